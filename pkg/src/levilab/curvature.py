"""Pointwise boundary geometry: Wirtinger data, bordered minors, curvatures.

Conventions fixed here and relied on everywhere else:

* f < 0 inside, so the outward normal is grad f / |grad f| and spheres get
  positive curvatures.
* pgrad_norm is the norm of the complex gradient (f_1, ..., f_{n+1}), which is
  half the real gradient norm for real f.
* The mean curvature is div(grad f / |grad f|) / (2n+1), the normalization
  under which a sphere of radius R has mean curvature 1/R.

Every function operates on batches; a FrameBatch of size one is the per-point
case. Real input is assumed (all defining functions here are real-valued), so
bordered determinants are real and their rounding-level imaginary parts are
checked and dropped.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGradientError
from .surfaces import BOUNDARY_VALUE_TOL, GRADIENT_FLOOR, SurfaceSpec, eval_jets

_IMAG_DROP_TOL = 1e-10


def wirtinger_gradient(rgrad: np.ndarray) -> np.ndarray:
    """(..., 2N) real gradient -> (..., N) complex gradient f_k = (d_x - i d_y)/2."""
    return (rgrad[..., 0::2] - 1j * rgrad[..., 1::2]) / 2.0


def complex_hessian(rhess: np.ndarray) -> np.ndarray:
    """(..., 2N, 2N) real Hessian -> (..., N, N) mixed Wirtinger Hessian.

    Entry (l, k) is the z_l, zbar_k second derivative; Hermitian for real f.
    """
    hxx = rhess[..., 0::2, 0::2]
    hyy = rhess[..., 1::2, 1::2]
    hxy = rhess[..., 0::2, 1::2]
    hyx = rhess[..., 1::2, 0::2]
    return 0.25 * (hxx + hyy + 1j * (hxy - hyx))


def _check_indices(indices, nvars: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices in {indices}")
    if not all(1 <= i <= nvars for i in idx):
        raise ValueError(f"indices {indices} out of range 1..{nvars}")
    return idx


def bordered_minor(wgrad: np.ndarray, whess: np.ndarray, indices) -> np.ndarray:
    """Determinant of the gradient-bordered Hessian block on an index set (1-based).

    Zero corner, conjugate gradient along the border row, gradient down the
    border column, Hessian block inside. Real for real f; the imaginary part
    is verified below tolerance and dropped.
    """
    idx = _check_indices(indices, wgrad.shape[-1])
    sel = [i - 1 for i in idx]
    b = wgrad.shape[0]
    size = len(sel) + 1
    mat = np.zeros((b, size, size), dtype=complex)
    mat[:, 0, 1:] = np.conj(wgrad[:, sel])
    mat[:, 1:, 0] = wgrad[:, sel]
    mat[:, 1:, 1:] = whess[:, sel][:, :, sel]
    det = np.linalg.det(mat)
    scale = np.maximum(1.0, np.max(np.abs(mat), axis=(1, 2)) ** size)
    bad = np.abs(det.imag) > _IMAG_DROP_TOL * scale
    if np.any(bad):
        i = int(np.argmax(np.abs(det.imag) / scale))
        raise ValueError(f"bordered minor has imaginary part {det.imag[i]:.3e}; input not a real function?")
    return det.real


def bordered_sum(wgrad: np.ndarray, whess: np.ndarray, j: int) -> np.ndarray:
    """Sum of the bordered minors over all increasing (j+1)-index sets."""
    nvars = wgrad.shape[-1]
    total = np.zeros(wgrad.shape[0])
    for idx in itertools.combinations(range(1, nvars + 1), j + 1):
        total += bordered_minor(wgrad, whess, idx)
    return total


@dataclass
class FrameBatch:
    """Boundary data at a batch of on-surface points.

    Carries both the raw second-order jets and the derived Wirtinger
    quantities; constructed through at_points/at_point, which verify that the
    points actually lie on the zero set and that the gradient is nondegenerate.
    """

    spec: SurfaceSpec
    points: np.ndarray      # (B, 2N)
    value: np.ndarray       # (B,)
    rgrad: np.ndarray       # (B, 2N)
    rhess: np.ndarray       # (B, 2N, 2N)
    wgrad: np.ndarray       # (B, N) complex
    whess: np.ndarray       # (B, N, N) complex
    pgrad_norm: np.ndarray  # (B,)  |complex gradient|
    normal: np.ndarray      # (B, 2N) outward unit normal
    nu: np.ndarray          # (B, N)  wgrad / pgrad_norm

    @property
    def n(self) -> int:
        return self.spec.n

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def at_points(cls, spec: SurfaceSpec, pts, boundary_tol: float | None = None) -> "FrameBatch":
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        j = eval_jets(spec, pts)
        value, rgrad, rhess = j.val, j.grad, j.hess
        if np.iscomplexobj(value):
            value, rgrad, rhess = value.real, rgrad.real, rhess.real
        tol = boundary_tol if boundary_tol is not None else BOUNDARY_VALUE_TOL * max(1.0, spec.scale**2)
        off = np.abs(value) > tol
        if np.any(off):
            i = int(np.argmax(np.abs(value)))
            raise ValueError(f"point {pts[i].tolist()} is off the boundary: f = {value[i]!r}")
        gnorm = np.linalg.norm(rgrad, axis=1)
        if np.any(gnorm <= GRADIENT_FLOOR):
            i = int(np.argmin(gnorm))
            raise DegenerateGradientError(f"|grad f| = {gnorm[i]:.3e} at {pts[i].tolist()}")
        wgrad = wirtinger_gradient(rgrad)
        whess = complex_hessian(rhess)
        pn = gnorm / 2.0
        return cls(
            spec=spec, points=pts, value=value, rgrad=rgrad, rhess=rhess,
            wgrad=wgrad, whess=whess, pgrad_norm=pn,
            normal=rgrad / gnorm[:, None], nu=wgrad / pn[:, None],
        )

    @classmethod
    def at_point(cls, spec: SurfaceSpec, p, boundary_tol: float | None = None) -> "FrameBatch":
        return cls.at_points(spec, np.asarray(p, dtype=float)[None, :], boundary_tol=boundary_tol)

    def bordered_minor(self, indices) -> np.ndarray:
        return bordered_minor(self.wgrad, self.whess, indices)

    def levi(self, j: int) -> np.ndarray:
        return levi(self, j)

    def mean_curvature(self) -> np.ndarray:
        return mean_curvature(self)


def levi(frames: FrameBatch, j: int) -> np.ndarray:
    """j-th Levi curvature from the bordered-minor sum.

    Normalized by the binomial count of index sets and by |complex gradient|
    to the power j+2, with the sign that makes spheres positive (f < 0 inside).
    """
    n = frames.n
    if not 1 <= j <= n:
        raise ValueError(f"j={j} out of range 1..{n}")
    if np.any(frames.pgrad_norm <= GRADIENT_FLOOR):
        i = int(np.argmin(frames.pgrad_norm))
        raise DegenerateGradientError(
            f"|del f| = {frames.pgrad_norm[i]:.3e} at {frames.points[i].tolist()}: characteristic point"
        )
    total = bordered_sum(frames.wgrad, frames.whess, j)
    return -total / (math.comb(n, j) * frames.pgrad_norm ** (j + 2))


def mean_curvature(frames: FrameBatch) -> np.ndarray:
    """Euclidean mean curvature: divergence of the unit normal over 2n+1."""
    if np.any(frames.pgrad_norm <= GRADIENT_FLOOR):
        i = int(np.argmin(frames.pgrad_norm))
        raise DegenerateGradientError(
            f"|del f| = {frames.pgrad_norm[i]:.3e} at {frames.points[i].tolist()}: characteristic point"
        )
    g = frames.rgrad
    h = frames.rhess
    gnorm = np.linalg.norm(g, axis=1)
    lap = np.trace(h, axis1=1, axis2=2)
    quad = np.einsum("bi,bij,bj->b", g, h, g)
    div_normal = lap / gnorm - quad / gnorm**3
    return div_normal / (2 * frames.n + 1)


def levi_at(spec: SurfaceSpec, p, j: int) -> float:
    """Scalar convenience: j-th Levi curvature at one boundary point."""
    return float(levi(FrameBatch.at_point(spec, p), j)[0])


def mean_curvature_at(spec: SurfaceSpec, p) -> float:
    """Scalar convenience: mean curvature at one boundary point."""
    return float(mean_curvature(FrameBatch.at_point(spec, p))[0])
