"""Surface, volume, and bulk integration over star-shaped domains in R^{2n+2}.

Everything is parametrized radially over the unit sphere: a boundary point is
center + rho(omega) * omega, the surface measure is

    d sigma = rho^{m-1} * |grad f| / <grad f, omega> d omega      (m = 2n+2),

volume is the integral of rho^m / m, and bulk integrals layer Gauss nodes
along each ray. Directions come from a spherical product rule (Gauss-Jacobi
in the polar cosines, trapezoid in the azimuth) or a seeded Monte Carlo
sampler.

Reproducibility contract: node order is fixed, nodes are processed in fixed
chunks whose partial sums are combined with compensated summation in fixed
order, and the optional thread pool (LEVILAB_THREADS) only distributes whole
chunks, so results are bitwise identical across runs and worker counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curvature import FrameBatch
from .surfaces import SurfaceSpec, eval_values, radial_roots

CHUNK = 8192  # fixed, independent of worker count; part of the determinism contract
_ERROR_ORDER_DROP = 4


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration method: deterministic product rule or seeded Monte Carlo."""

    method: str = "gauss"          # "gauss" | "mc"
    order: int = 24                # Gauss-Legendre points per angle
    samples: int = 100_000         # Monte Carlo sample count
    seed: int = 0                  # Monte Carlo stream seed
    radial_order: int | None = None  # Gauss points along each ray (default: order)
    center: tuple | None = None    # override of the surface's star center

    def __post_init__(self):
        if self.method not in ("gauss", "mc"):
            raise ValueError(f"method must be 'gauss' or 'mc', got {self.method!r}")
        if self.method == "gauss" and self.order < 2:
            raise ValueError(f"order must be >= 2, got {self.order}")
        if self.method == "mc" and self.samples < 1000:
            raise ValueError(f"samples must be >= 1000, got {self.samples}")

    def describe(self) -> str:
        if self.method == "gauss":
            return f"gauss:order={self.order}"
        return f"mc:samples={self.samples},seed={self.seed}"


@dataclass(frozen=True)
class IntegralResult:
    """One computed integral with its self-estimated error."""

    value: float
    error_estimate: float
    nodes_used: int
    method: str

    def __post_init__(self):
        if not math.isfinite(self.error_estimate) or self.error_estimate < 0:
            raise ValueError(f"bad error estimate {self.error_estimate!r}")
        if self.nodes_used <= 0:
            raise ValueError("nodes_used must be positive")


def sphere_area(m: int, radius: float = 1.0) -> float:
    """Area of the radius-R sphere in R^m."""
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2) * radius ** (m - 1)


def ball_volume(m: int, radius: float = 1.0) -> float:
    """Volume of the radius-R ball in R^m."""
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1) * radius**m


_AZIMUTH_FACTOR = 2  # trapezoid points per order unit; matches polar exactness degree


@lru_cache(maxsize=32)
def sphere_grid(m: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Product quadrature directions and weights on the unit sphere of R^m.

    Each polar angle is handled in x = cos(theta) by the Gauss-Jacobi rule
    whose weight absorbs the sin^{m-2-i} surface factor exactly; the periodic
    azimuth uses the trapezoid rule with 2*order points (exact for trig
    polynomials of degree < 2*order). The product is exact for all spherical
    polynomials of degree <= 2*order - 1, which plain Gauss-Legendre in the
    angles is not; nodes are enumerated lexicographically and never reordered.
    """
    from scipy.special import roots_jacobi

    angle_nodes = []
    angle_wts = []
    for i in range(m - 2):
        beta = (m - 2 - i - 1) / 2.0  # weight (1 - x^2)^beta from sin^{m-2-i}
        x, w = roots_jacobi(order, beta, beta)
        angle_nodes.append(x)
        angle_wts.append(w)
    naz = _AZIMUTH_FACTOR * order
    angle_nodes.append((np.arange(naz) + 0.5) * 2 * np.pi / naz)
    angle_wts.append(np.full(naz, 2 * np.pi / naz))
    grids = np.meshgrid(*angle_nodes, indexing="ij")
    wgrids = np.meshgrid(*angle_wts, indexing="ij")
    b = grids[0].size
    dirs = np.empty((b, m))
    sin_prod = np.ones(b)
    wts = np.ones(b)
    for i in range(m - 1):
        t = grids[i].reshape(-1)
        wts = wts * wgrids[i].reshape(-1)
        if i < m - 2:
            cos_t, sin_t = t, np.sqrt(1.0 - t * t)  # t is already cos(theta_i)
        else:
            cos_t, sin_t = np.cos(t), np.sin(t)
        dirs[:, i] = sin_prod * cos_t
        sin_prod = sin_prod * sin_t
    dirs[:, m - 1] = sin_prod
    dirs.setflags(write=False)
    wts.setflags(write=False)
    return dirs, wts


def mc_directions(m: int, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform directions on the unit sphere of R^m with equal weights."""
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((samples, m))
    d /= np.linalg.norm(d, axis=1)[:, None]
    wts = np.full(samples, sphere_area(m) / samples)
    return d, wts


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("LEVILAB_THREADS", "1")))
    except ValueError:
        return 1


def _neumaier(values) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _map_chunks(fn, nchunks: int) -> list:
    workers = _workers()
    if workers == 1 or nchunks == 1:
        return [fn(i) for i in range(nchunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(nchunks)))


def _center_of(spec: SurfaceSpec, q: QuadratureSpec) -> np.ndarray:
    if q.center is not None:
        return np.asarray(q.center, dtype=float)
    from .errors import StarShapeError

    if spec.star_center is None:
        raise StarShapeError(f"{type(spec).__name__} has no star center; cannot integrate")
    return spec.star_center


# roots are the expensive part of every pass; cache them per (surface, grid)
_ROOT_CACHE: dict = {}
_ROOT_CACHE_CAP = 16


def _roots_on_grid(spec: SurfaceSpec, center: np.ndarray, dirs: np.ndarray, key) -> tuple[np.ndarray, np.ndarray]:
    cache_key = (spec.canonical(), tuple(center.tolist()), key)
    hit = _ROOT_CACHE.get(cache_key)
    if hit is not None:
        return hit
    nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK

    def job(i):
        sl = slice(i * CHUNK, (i + 1) * CHUNK)
        return radial_roots(spec, dirs[sl], center=center)

    parts = _map_chunks(job, nchunks)
    rho = np.concatenate([p[0] for p in parts])
    slope = np.concatenate([p[1] for p in parts])
    if len(_ROOT_CACHE) >= _ROOT_CACHE_CAP:
        _ROOT_CACHE.pop(next(iter(_ROOT_CACHE)))
    _ROOT_CACHE[cache_key] = (rho, slope)
    return rho, slope


def _grid_for(spec: SurfaceSpec, q: QuadratureSpec, order: int | None = None):
    m = spec.m
    if q.method == "gauss":
        o = order if order is not None else q.order
        dirs, wts = sphere_grid(m, o)
        return dirs, wts, ("gauss", m, o)
    dirs, wts = mc_directions(m, q.samples, q.seed)
    return dirs, wts, ("mc", m, q.samples, q.seed)


def _surface_pass(spec: SurfaceSpec, field, q: QuadratureSpec, order: int | None = None):
    """One full surface quadrature pass; returns (value, per-node values, weights)."""
    center = _center_of(spec, q)
    dirs, wts, key = _grid_for(spec, q, order)
    rho, slope = _roots_on_grid(spec, center, dirs, key)
    m = spec.m
    nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK

    def job(i):
        sl = slice(i * CHUNK, (i + 1) * CHUNK)
        pts = center[None, :] + rho[sl, None] * dirs[sl]
        frames = FrameBatch.at_points(spec, pts)
        gnorm = 2.0 * frames.pgrad_norm
        jac = rho[sl] ** (m - 1) * gnorm / slope[sl]
        vals = np.asarray(field(frames), dtype=float) * jac
        return float(np.dot(vals, wts[sl])), vals

    parts = _map_chunks(job, nchunks)
    value = _neumaier(p[0] for p in parts)
    node_vals = np.concatenate([p[1] for p in parts])
    return value, node_vals, wts


def surface_integral(spec: SurfaceSpec, field, q: QuadratureSpec) -> IntegralResult:
    """Integral of a boundary scalar over the surface.

    field maps a FrameBatch to one value per point. The product rule reports
    |value(order) - value(order-4)| as its error estimate; Monte Carlo reports
    the standard error of the weighted estimator.
    """
    value, node_vals, wts = _surface_pass(spec, field, q)
    if q.method == "gauss":
        low, _, _ = _surface_pass(spec, field, q, order=max(2, q.order - _ERROR_ORDER_DROP))
        err = abs(value - low)
        nodes = wts.shape[0]
    else:
        est = node_vals * wts * node_vals.shape[0]  # per-sample estimator of the total
        err = float(np.std(est, ddof=1) / math.sqrt(est.shape[0]))
        nodes = node_vals.shape[0]
    return IntegralResult(value, err, nodes, q.describe())


def _volume_pass(spec: SurfaceSpec, q: QuadratureSpec, order: int | None = None):
    center = _center_of(spec, q)
    dirs, wts, key = _grid_for(spec, q, order)
    rho, _ = _roots_on_grid(spec, center, dirs, key)
    m = spec.m
    vals = rho**m / m
    nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK
    value = _neumaier(
        float(np.dot(vals[i * CHUNK:(i + 1) * CHUNK], wts[i * CHUNK:(i + 1) * CHUNK])) for i in range(nchunks)
    )
    return value, vals, wts


def volume(spec: SurfaceSpec, q: QuadratureSpec) -> IntegralResult:
    """Lebesgue measure of the enclosed domain via the radial formula."""
    value, vals, wts = _volume_pass(spec, q)
    if q.method == "gauss":
        low, _, _ = _volume_pass(spec, q, order=max(2, q.order - _ERROR_ORDER_DROP))
        err = abs(value - low)
    else:
        est = vals * wts * vals.shape[0]
        err = float(np.std(est, ddof=1) / math.sqrt(est.shape[0]))
    return IntegralResult(value, err, wts.shape[0], q.describe())


def _bulk_pass(spec: SurfaceSpec, field, q: QuadratureSpec, order: int | None = None):
    center = _center_of(spec, q)
    dirs, wts, key = _grid_for(spec, q, order)
    rho, _ = _roots_on_grid(spec, center, dirs, key)
    m = spec.m
    nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK

    if q.method == "gauss":
        r_order = q.radial_order if q.radial_order is not None else (order if order is not None else q.order)
        t, u = np.polynomial.legendre.leggauss(r_order)
        t = (t + 1) / 2
        u = u / 2

        def job(i):
            sl = slice(i * CHUNK, (i + 1) * CHUNK)
            acc = np.zeros(min(CHUNK, dirs.shape[0] - i * CHUNK))
            for t_i, u_i in zip(t, u):
                r = rho[sl] * t_i
                pts = center[None, :] + r[:, None] * dirs[sl]
                acc += u_i * r ** (m - 1) * rho[sl] * np.asarray(field(pts), dtype=float)
            return float(np.dot(acc, wts[sl])), acc

        parts = _map_chunks(job, nchunks)
        return _neumaier(p[0] for p in parts), np.concatenate([p[1] for p in parts]), wts

    rng = np.random.default_rng(q.seed + 1)  # radial stream distinct from the direction sampler
    uu = rng.random(dirs.shape[0]) ** (1.0 / m)

    def job(i):
        sl = slice(i * CHUNK, (i + 1) * CHUNK)
        r = rho[sl] * uu[sl]
        pts = center[None, :] + r[:, None] * dirs[sl]
        vals = rho[sl] ** m / m * np.asarray(field(pts), dtype=float)
        return float(np.dot(vals, wts[sl])), vals

    parts = _map_chunks(job, nchunks)
    return _neumaier(p[0] for p in parts), np.concatenate([p[1] for p in parts]), wts


def bulk_integral(spec: SurfaceSpec, field, q: QuadratureSpec) -> IntegralResult:
    """Integral of an interior scalar over the domain by radial layering.

    field maps an array of points (B, m) to one value per point.
    """
    value, vals, wts = _bulk_pass(spec, field, q)
    if q.method == "gauss":
        low, _, _ = _bulk_pass(spec, field, q, order=max(2, q.order - _ERROR_ORDER_DROP))
        err = abs(value - low)
    else:
        est = vals * wts * vals.shape[0]
        err = float(np.std(est, ddof=1) / math.sqrt(est.shape[0]))
    return IntegralResult(value, err, wts.shape[0], q.describe())


def scan_boundary(spec: SurfaceSpec, q: QuadratureSpec, fn, order: int | None = None):
    """Apply fn(FrameBatch) -> array or tuple of arrays over every boundary node.

    Returns the concatenated per-node outputs in fixed node order, plus the
    node weights and boundary points; used for node sweeps (extrema, defects)
    that are not integrals.
    """
    center = _center_of(spec, q)
    dirs, wts, key = _grid_for(spec, q, order)
    rho, _ = _roots_on_grid(spec, center, dirs, key)
    nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK

    def job(i):
        sl = slice(i * CHUNK, (i + 1) * CHUNK)
        pts = center[None, :] + rho[sl, None] * dirs[sl]
        frames = FrameBatch.at_points(spec, pts)
        out = fn(frames)
        return (out if isinstance(out, tuple) else (out,)), pts

    parts = _map_chunks(job, nchunks)
    nfields = len(parts[0][0])
    gathered = tuple(np.concatenate([p[0][k] for p in parts]) for k in range(nfields))
    points = np.concatenate([p[1] for p in parts])
    return (gathered[0] if nfields == 1 else gathered), wts, points


def scan_bulk(spec: SurfaceSpec, q: QuadratureSpec, fn, shells: int = 4):
    """Apply fn(points) over an interior sample: a few radial shells of the
    direction grid, strictly inside the boundary. Returns concatenated outputs."""
    center = _center_of(spec, q)
    dirs, _, key = _grid_for(spec, q)
    rho, _ = _roots_on_grid(spec, center, dirs, key)
    fracs = (np.arange(1, shells + 1) - 0.5) / shells
    outs = []
    for fr in fracs:
        r = rho * fr
        nchunks = (dirs.shape[0] + CHUNK - 1) // CHUNK

        def job(i):
            sl = slice(i * CHUNK, (i + 1) * CHUNK)
            pts = center[None, :] + r[sl, None] * dirs[sl]
            return np.asarray(fn(pts))

        outs.append(np.concatenate(_map_chunks(job, nchunks)))
    return np.concatenate(outs)


def clear_root_cache() -> None:
    _ROOT_CACHE.clear()
