"""Defining-function families on C^{n+1} identified with R^{2n+2}.

Real coordinates are interleaved as (x1, y1, ..., x_{n+1}, y_{n+1}) with
z_k = x_k + i y_k. Every family produces a smooth real defining function f
with f < 0 inside, f = 0 on the boundary, and provides exact-to-rounding
value/gradient/Hessian data through the second-order jet engine; no finite
differencing happens on the default path.

Star-shaped families declare a star center and are validated at construction
on a coarse direction grid: every ray from the center must cross the boundary
once, transversally, with a nondegenerate gradient there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import DegenerateGradientError, DomainError, StarShapeError, TransversalityError
from .jets import Jet
from .reinhardt import ReinhardtProfile, reinhardt_profile

ROOT_ABS_TOL = 1e-12        # |f| at a radial root
BOUNDARY_VALUE_TOL = 1e-10  # |f| accepted when a point claims to be on the boundary
GRADIENT_FLOOR = 1e-10      # |grad f| below this is a characteristic degeneracy
MAX_RADIUS_FACTOR = 1e3     # star-shaped search radius in units of the family scale


@dataclass(frozen=True)
class Jet2:
    """Second-order data of the defining function at one point."""

    value: float
    rgrad: np.ndarray
    rhess: np.ndarray

    def __post_init__(self):
        dev = float(np.max(np.abs(self.rhess - self.rhess.T)))
        if dev > 1e-12 * max(1.0, float(np.max(np.abs(self.rhess)))):
            raise ValueError(f"Hessian asymmetry {dev:.3e} exceeds tolerance")


class SurfaceSpec:
    """Base class: a named defining-function family over C^{n+1}."""

    n: int
    star_center: np.ndarray | None
    scale: float

    @property
    def m(self) -> int:
        return 2 * (self.n + 1)

    def build(self, coords: list[Jet]) -> Jet:
        raise NotImplementedError

    def canonical(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.canonical()})"


def _fmt_vec(v) -> str:
    return ",".join(repr(float(x)) for x in v)


def _center_array(center, m: int) -> np.ndarray:
    if center is None:
        return np.zeros(m)
    c = np.asarray(center, dtype=float)
    if c.shape != (m,):
        raise ValueError(f"center must have {m} coordinates, got shape {c.shape}")
    return c


class Sphere(SurfaceSpec):
    """|z - z0|^2 = R^2."""

    def __init__(self, radius: float, center=None, n: int = 1):
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        self.n = int(n)
        self.radius = float(radius)
        self.center = _center_array(center, self.m)
        self.star_center = self.center
        self.scale = self.radius
        _validate_star_family(self)

    def build(self, coords):
        total = None
        for i, x in enumerate(coords):
            d = x - self.center[i]
            sq = d * d
            total = sq if total is None else total + sq
        return total - self.radius**2

    def canonical(self):
        return f"sphere:R={self.radius!r},center={_fmt_vec(self.center)}"


class Ellipsoid(SurfaceSpec):
    """Axis-aligned real ellipsoid, one semi-axis per real coordinate."""

    def __init__(self, axes, center=None):
        a = np.asarray(axes, dtype=float)
        if a.ndim != 1 or len(a) < 4 or len(a) % 2:
            raise ValueError("axes must list 2(n+1) >= 4 semi-axes")
        if np.any(a <= 0):
            raise ValueError("all semi-axes must be positive")
        self.n = len(a) // 2 - 1
        self.axes = a
        self.center = _center_array(center, self.m)
        self.star_center = self.center
        self.scale = float(np.max(a))
        _validate_star_family(self)

    def build(self, coords):
        total = None
        for i, x in enumerate(coords):
            d = (x - self.center[i]) * (1.0 / self.axes[i])
            sq = d * d
            total = sq if total is None else total + sq
        return total - 1.0

    def canonical(self):
        return f"ellipsoid:axes={_fmt_vec(self.axes)},center={_fmt_vec(self.center)}"


class PerturbedQuadric(SurfaceSpec):
    """-c + |z|^2/(n+1) plus the real part of a holomorphic polynomial.

    The perturbation is pluriharmonic, so the complex Hessian of f is exactly
    I/(n+1) everywhere regardless of the perturbation coefficients. Holomorphic
    exponents must have total degree >= 2 so the perturbation vanishes to
    second order at the origin.
    """

    def __init__(self, n: int, c: float = 1.0, hterms: dict | None = None):
        if c <= 0:
            raise ValueError(f"c must be positive, got {c}")
        self.n = int(n)
        self.c = float(c)
        terms = {}
        for exps, coeff in (hterms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n + 1 or any(e < 0 for e in exps):
                raise ValueError(f"bad holomorphic exponent vector {exps}")
            if sum(exps) < 2:
                raise ValueError(f"perturbation monomial {exps} must have degree >= 2")
            coeff = complex(coeff)
            if coeff != 0:
                terms[exps] = coeff
        self.hterms = dict(sorted(terms.items()))
        self.star_center = np.zeros(self.m)
        self.scale = math.sqrt(self.c * (self.n + 1))
        _validate_star_family(self)

    def build(self, coords):
        quad = None
        for x in coords:
            sq = x * x
            quad = sq if quad is None else quad + sq
        f = quad * (1.0 / (self.n + 1)) - self.c
        if self.hterms:
            zs, _ = jets.complex_coords(coords)
            h = None
            for exps, coeff in self.hterms.items():
                term = None
                for i, e in enumerate(exps):
                    if e:
                        p = zs[i] ** e
                        term = p if term is None else term * p
                term = term * coeff
                h = term if h is None else h + term
            f = f + h.real
        return f

    def canonical(self):
        ht = ";".join(f"{coeff!r}:{','.join(str(e) for e in exps)}" for exps, coeff in self.hterms.items())
        return f"quadric:n={self.n},c={self.c!r},hterms={ht}"


class Cylinder(SurfaceSpec):
    """Unbounded model surfaces in C^2; no star center, pointwise use only.

    kind='flat' is |z1|^2 = R^2 (zero Levi curvature); kind='curved' is
    |z1|^2 + (Re z2)^2 = R^2, a round cylinder over S^2 in R^4.
    """

    def __init__(self, radius: float, kind: str = "flat"):
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        if kind not in ("flat", "curved"):
            raise ValueError(f"kind must be 'flat' or 'curved', got {kind!r}")
        self.n = 1
        self.radius = float(radius)
        self.kind = kind
        self.star_center = None
        self.scale = self.radius

    def build(self, coords):
        x1, y1, x2, _y2 = coords
        f = x1 * x1 + y1 * y1 - self.radius**2
        if self.kind == "curved":
            f = f + x2 * x2
        return f

    def canonical(self):
        return f"cylinder:kind={self.kind},R={self.radius!r}"


class ReinhardtSurface(SurfaceSpec):
    """Rotation-invariant surface |z1|^2 = f(|z2|^2) driven by an integrated profile.

    Regular starts (fp0 omitted) integrate from s = 0 and, with the right data,
    close up into a compact star-shaped surface; band data (s0 > 0) yields an
    annular piece usable for pointwise curvature only.
    """

    def __init__(self, k: float, f0: float, fp0: float | None = None,
                 s0: float = 0.0, smax: float | None = None):
        self.n = 1
        self.profile: ReinhardtProfile = reinhardt_profile(k, f0, fp0=fp0, s0=s0, smax=smax)
        self.k = float(k)
        self.scale = math.sqrt(max(self.profile.f0, self.profile.s_end))
        self.star_center = np.zeros(4) if self.profile.closed else None
        if self.profile.closed:
            _validate_star_family(self)

    def build(self, coords):
        x1, y1, x2, y2 = coords
        r1sq = x1 * x1 + y1 * y1
        s = x2 * x2 + y2 * y2
        fval, fp, fpp = self.profile.eval(s.val)
        return r1sq - s.apply(fval, fp, fpp)

    def boundary_point(self, s: float, phase1: float = 0.0, phase2: float = 0.0) -> np.ndarray:
        """A point on the surface at profile parameter s and torus phases."""
        fval, _, _ = self.profile.eval(float(s))
        if fval < 0:
            raise DomainError(f"profile is negative at s={s}; no surface point there")
        r1, r2 = math.sqrt(fval), math.sqrt(s)
        return np.array([
            r1 * math.cos(phase1), r1 * math.sin(phase1),
            r2 * math.cos(phase2), r2 * math.sin(phase2),
        ])

    def canonical(self):
        p = self.profile
        extra = "" if p.regular_start else f",fp0={p.fp0!r},s0={p.s_lo!r}"
        return f"reinhardt:k={self.k!r},f0={p.f0!r}{extra},smax={p.s_end!r}"


class UserPolynomial(SurfaceSpec):
    """Re(p) for a polynomial p in z and zbar with complex float coefficients.

    Exponent keys are tuples of length 2(n+1), z-block first. The defining
    function is the real part, so conjugate-symmetric input reproduces the
    polynomial itself and anything else is implicitly symmetrized.
    """

    def __init__(self, n: int, coeffs: dict, center=None, scale: float = 1.0, validate: bool = True):
        self.n = int(n)
        width = 2 * (self.n + 1)
        clean = {}
        for exps, c in coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != width or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for n={self.n}")
            c = complex(c)
            if c != 0:
                clean[exps] = c
        if not clean:
            raise ValueError("polynomial has no terms")
        self.coeffs = dict(sorted(clean.items()))
        self.star_center = _center_array(center, self.m)
        self.scale = float(scale)
        if validate:
            _validate_star_family(self)

    def build(self, coords):
        zs, zbs = jets.complex_coords(coords)
        total = None
        for exps, c in self.coeffs.items():
            term = None
            for i in range(self.n + 1):
                for var, e in ((zs[i], exps[i]), (zbs[i], exps[self.n + 1 + i])):
                    if e:
                        p = var ** e
                        term = p if term is None else term * p
            if term is None:
                term = Jet.constant(1.0 + 0j, coords[0])
            term = term * c
            total = term if total is None else total + term
        return total.real

    def canonical(self):
        ts = ";".join(f"{c!r}:{','.join(str(e) for e in exps)}" for exps, c in self.coeffs.items())
        return f"poly:n={self.n},terms={ts}"


class ExpReparam(SurfaceSpec):
    """exp(f) - 1 for a base family: same zero set and inside, different jets."""

    def __init__(self, base: SurfaceSpec):
        self.base = base
        self.n = base.n
        self.star_center = base.star_center
        self.scale = base.scale

    def build(self, coords):
        return jets.exp(self.base.build(coords)) - 1.0

    def canonical(self):
        return f"exp({self.base.canonical()})"


# -- evaluation ----------------------------------------------------------------


def _check_points(pts, m: int) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != m:
        raise ValueError(f"points must have shape (B, {m}), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    return pts


def eval_jets(spec: SurfaceSpec, pts) -> Jet:
    """Full value/gradient/Hessian jets of the defining function at points (B, m)."""
    pts = _check_points(pts, spec.m)
    return spec.build(Jet.variables(pts))


def eval_values(spec: SurfaceSpec, pts) -> np.ndarray:
    """Values only, via width-0 jets (near-scalar cost)."""
    pts = _check_points(pts, spec.m)
    b = pts.shape[0]
    coords = [Jet(pts[:, i].copy(), np.zeros((b, 0)), np.zeros((b, 0, 0))) for i in range(spec.m)]
    out = spec.build(coords).val
    return out.real if np.iscomplexobj(out) else out


def eval_ray(spec: SurfaceSpec, center: np.ndarray, dirs: np.ndarray, rho: np.ndarray) -> Jet:
    """Width-1 jets along rays center + rho * dir; grad/hess are directional."""
    return spec.build(Jet.ray_variables(center, dirs, rho))


def jet(spec: SurfaceSpec, p) -> Jet2:
    """Second-order jet of the defining function at a single point."""
    j = eval_jets(spec, np.asarray(p, dtype=float)[None, :])
    val, grad, hess = j.val[0], j.grad[0], j.hess[0]
    if np.iscomplexobj(val):
        val, grad, hess = val.real, grad.real, hess.real
    return Jet2(float(val), grad.copy(), hess.copy())


# -- radial roots ---------------------------------------------------------------


def radial_roots(spec: SurfaceSpec, dirs, center=None) -> tuple[np.ndarray, np.ndarray]:
    """Boundary crossings along rays from the star center, vectorized.

    Returns (rho, slope) with f(center + rho * dir) = 0 to ROOT_ABS_TOL and
    slope = <grad f, dir> > 0 at each root. Safeguarded Newton inside a
    bracket obtained by doubling; failure to bracket within the configured
    search radius means the domain is not star-shaped about the center.
    """
    if center is None:
        center = spec.star_center
    if center is None:
        raise StarShapeError(f"{type(spec).__name__} declares no star center")
    center = np.asarray(center, dtype=float)
    dirs = np.asarray(dirs, dtype=float)
    if dirs.ndim == 1:
        dirs = dirs[None, :]
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        dirs = dirs / norms[:, None]
    b = dirs.shape[0]

    fc = float(eval_values(spec, center[None, :])[0])
    if fc >= 0:
        raise StarShapeError(f"defining function is nonnegative ({fc!r}) at the star center")

    max_radius = MAX_RADIUS_FACTOR * spec.scale
    lo = np.zeros(b)
    hi = np.full(b, spec.scale)
    for _ in range(64):
        fhi = eval_values(spec, center[None, :] + hi[:, None] * dirs)
        neg = fhi <= 0
        if not np.any(neg):
            break
        lo = np.where(neg, hi, lo)
        hi = np.where(neg, hi * 2.0, hi)
        if np.any(hi > max_radius):
            idx = int(np.argmax(hi))
            raise StarShapeError(
                f"no boundary crossing within radius {max_radius:g} along direction {dirs[idx].tolist()}"
            )
    else:
        raise StarShapeError("bracketing did not terminate")

    rho = 0.5 * (lo + hi)
    g = np.empty(b)
    gp = np.empty(b)
    active = np.ones(b, dtype=bool)
    for _ in range(200):
        rj = eval_ray(spec, center, dirs[active], rho[active])
        g[active] = rj.val.real if np.iscomplexobj(rj.val) else rj.val
        gp[active] = rj.grad[:, 0].real if np.iscomplexobj(rj.grad) else rj.grad[:, 0]
        pos = g > 0
        hi = np.where(active & pos, rho, hi)
        lo = np.where(active & ~pos, rho, lo)
        # converge two orders below the acceptance threshold checked afterwards
        tol = 0.01 * ROOT_ABS_TOL * np.maximum(1.0, np.abs(gp) * rho)
        active &= (np.abs(g) > tol) & (hi - lo > 1e-17 * np.maximum(1.0, rho))
        if not np.any(active):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = rho - g / gp
        ok = active & np.isfinite(newton) & (newton > lo) & (newton < hi)
        rho = np.where(ok, newton, np.where(active, 0.5 * (lo + hi), rho))
    else:
        worst = int(np.argmax(np.abs(g)))
        raise StarShapeError(f"radial root failed to converge along direction {dirs[worst].tolist()}")

    # one clean evaluation at the final roots for the returned slope
    rj = eval_ray(spec, center, dirs, rho)
    gv = rj.val.real if np.iscomplexobj(rj.val) else rj.val
    gs = rj.grad[:, 0].real if np.iscomplexobj(rj.grad) else rj.grad[:, 0]
    if np.any(gs <= 0):
        idx = int(np.argmin(gs))
        raise TransversalityError(
            f"<grad f, direction> = {gs[idx]!r} <= 0 at the root along {dirs[idx].tolist()}"
        )
    bad = np.abs(gv) > ROOT_ABS_TOL * np.maximum(1.0, np.abs(gs) * rho)
    if np.any(bad):
        idx = int(np.argmax(np.abs(gv)))
        raise StarShapeError(f"residual {gv[idx]!r} at radial root along {dirs[idx].tolist()}")
    return rho, gs


def radial_root(spec: SurfaceSpec, direction) -> tuple[float, float]:
    """Single-ray convenience wrapper around radial_roots."""
    rho, slope = radial_roots(spec, np.asarray(direction, dtype=float)[None, :])
    return float(rho[0]), float(slope[0])


def boundary_points(spec: SurfaceSpec, dirs, center=None) -> np.ndarray:
    """Points center + rho(dir) * dir for a batch of directions."""
    if center is None:
        center = spec.star_center
    rho, _ = radial_roots(spec, dirs, center=center)
    dirs = np.asarray(dirs, dtype=float)
    return np.asarray(center, dtype=float)[None, :] + rho[:, None] * dirs


# -- construction-time validation ----------------------------------------------


def _coarse_directions(m: int) -> np.ndarray:
    rows = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        rows.append(e.copy())
        rows.append(-e)
    for signs in np.ndindex(*(2,) * m):
        v = np.array([1.0 if s == 0 else -1.0 for s in signs]) / math.sqrt(m)
        rows.append(v)
    return np.array(rows)


def _validate_star_family(spec: SurfaceSpec) -> None:
    dirs = _coarse_directions(spec.m)
    rho, _ = radial_roots(spec, dirs)
    pts = spec.star_center[None, :] + rho[:, None] * dirs
    j = eval_jets(spec, pts)
    vals = j.val.real if np.iscomplexobj(j.val) else j.val
    grads = j.grad.real if np.iscomplexobj(j.grad) else j.grad
    if np.any(np.abs(vals) > BOUNDARY_VALUE_TOL * max(1.0, spec.scale**2)):
        raise StarShapeError(f"boundary residual {np.max(np.abs(vals)):.3e} too large at validation points")
    gn = np.linalg.norm(grads, axis=1)
    if np.any(gn <= GRADIENT_FLOOR):
        raise DegenerateGradientError(
            f"gradient norm {np.min(gn):.3e} at a validation boundary point"
        )
