import math
import os

import numpy as np
import pytest

from levilab import curvature as cv
from levilab import quadrature as qd
from levilab import surfaces as sf
from levilab.errors import StarShapeError
from levilab.verify import DirichletQuadratic


def ones(frames):
    return np.ones(len(frames))


Q24 = qd.QuadratureSpec(order=24)
Q16 = qd.QuadratureSpec(order=16)


class TestGrid:
    @pytest.mark.parametrize("m", [4, 6])
    def test_total_weight_is_sphere_area(self, m):
        dirs, wts = qd.sphere_grid(m, 12)
        assert wts.sum() == pytest.approx(qd.sphere_area(m), rel=1e-13)
        assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-14)

    def test_polynomial_exactness(self):
        # moments of even monomials on S^3: int w1^2 = area/4, int w1^2 w3^2 = area/24
        dirs, wts = qd.sphere_grid(4, 6)
        area = qd.sphere_area(4)
        assert np.dot(dirs[:, 0] ** 2, wts) == pytest.approx(area / 4, rel=1e-12)
        assert np.dot(dirs[:, 0] ** 2 * dirs[:, 2] ** 2, wts) == pytest.approx(area / 24, rel=1e-12)
        assert abs(np.dot(dirs[:, 1] * dirs[:, 3], wts)) < 1e-14

    def test_mc_directions_deterministic(self):
        d1, w1 = qd.mc_directions(4, 5000, seed=9)
        d2, w2 = qd.mc_directions(4, 5000, seed=9)
        assert np.array_equal(d1, d2) and np.array_equal(w1, w2)


class TestSurfaceIntegral:
    def test_sphere_area(self):
        res = qd.surface_integral(sf.Sphere(2.0), ones, Q24)
        exact = 2 * math.pi**2 * 8
        assert abs(res.value - exact) / exact < 1e-8
        assert abs(res.value - exact) <= max(res.error_estimate * 10, 1e-10)

    def test_constant_curvature_field(self):
        res = qd.surface_integral(sf.Sphere(2.0), lambda fr: cv.levi(fr, 1), Q24)
        exact = 2 * math.pi**2 * 4
        assert abs(res.value - exact) / exact < 1e-8

    def test_order_consistency_within_estimate(self):
        spec = sf.Ellipsoid([1.0, 1.0, 1.0, 2.0])
        r16 = qd.surface_integral(spec, ones, Q16)
        r24 = qd.surface_integral(spec, ones, Q24)
        assert abs(r16.value - r24.value) <= max(r16.error_estimate, 1e-12)

    def test_jacobian_reduces_to_one_on_sphere(self):
        # rho const and |grad f| = <grad f, omega>: the integrand weight is rho^3
        dirs, wts = qd.sphere_grid(4, 8)
        rho, slope = sf.radial_roots(sf.Sphere(1.3), dirs)
        fr = cv.FrameBatch.at_points(sf.Sphere(1.3), 1.3 * dirs)
        jac = rho**3 * (2 * fr.pgrad_norm) / slope
        assert np.max(np.abs(jac - 1.3**3)) < 1e-11


class TestVolume:
    def test_ball(self):
        res = qd.volume(sf.Sphere(2.0), Q24)
        exact = math.pi**2 * 16 / 2
        assert abs(res.value - exact) / exact < 1e-8

    def test_ellipsoid_change_of_variables(self):
        res = qd.volume(sf.Ellipsoid([1.0, 1.0, 1.0, 2.0]), qd.QuadratureSpec(order=32))
        exact = math.pi**2 / 2 * 2.0
        assert abs(res.value - exact) / exact < 1e-7

    def test_ball_monte_carlo(self):
        res = qd.volume(sf.Sphere(2.0), qd.QuadratureSpec(method="mc", samples=10_000, seed=42))
        exact = math.pi**2 * 8
        assert abs(res.value - exact) <= max(3 * res.error_estimate, 1e-9)

    def test_ellipsoid_monte_carlo_within_three_sigma(self):
        res = qd.volume(sf.Ellipsoid([1.0, 1.2, 0.9, 1.1]), qd.QuadratureSpec(method="mc", samples=200_000, seed=7))
        exact = math.pi**2 / 2 * 1.0 * 1.2 * 0.9 * 1.1
        assert abs(res.value - exact) <= 3 * res.error_estimate
        assert res.error_estimate > 0


class TestBulkIntegral:
    def test_constant_field_matches_volume(self):
        spec = sf.Sphere(2.0)
        bulk = qd.bulk_integral(spec, lambda pts: np.ones(pts.shape[0]), Q24)
        vol = qd.volume(spec, Q24)
        assert abs(bulk.value - vol.value) / vol.value < 1e-10

    def test_hessian_invariant_field_on_ball(self):
        # the mixed Hessian of |z|^2 - R^2 is the identity: sigma_2 = 1 for n=1
        from levilab.hermitian import sigma_batch

        spec = sf.Sphere(2.0)

        def field(pts):
            jt = sf.eval_jets(spec, pts)
            return sigma_batch(cv.complex_hessian(jt.hess), 2)

        res = qd.bulk_integral(spec, field, Q24)
        exact = math.pi**2 * 8
        assert abs(res.value - exact) / exact < 1e-10

    def test_constant_hessian_of_quadratic(self):
        from levilab.hermitian import sigma, sigma_batch

        dspec = DirichletQuadratic([1.0, 1.0, 1.0, 2.0])

        def field(pts):
            jt = sf.eval_jets(dspec, pts)
            return sigma_batch(cv.complex_hessian(jt.hess), 2)

        res = qd.bulk_integral(dspec, field, Q24)
        const = sigma(np.diag(dspec.hessian_diagonal().astype(complex)), 2)
        vol = qd.volume(dspec, Q24).value
        assert abs(res.value - const * vol) / abs(const * vol) < 1e-8


class TestSelfConsistency:
    @pytest.mark.parametrize("make", [
        lambda: sf.Sphere(1.5),
        lambda: sf.Ellipsoid([1.0, 1.0, 1.0, 2.0]),
        lambda: sf.PerturbedQuadric(1, c=1.0, hterms={(2, 0): 0.25, (0, 2): 0.25}),
        lambda: sf.ReinhardtSurface(0.5, 4.0),
    ])
    def test_divergence_theorem(self, make):
        spec = make()
        flux = qd.surface_integral(spec, lambda fr: np.einsum("bi,bi->b", fr.points, fr.normal), Q24)
        vol = qd.volume(spec, Q24)
        m = spec.m
        assert abs(flux.value - m * vol.value) <= 10 * (flux.error_estimate + m * vol.error_estimate) + 1e-9

    @pytest.mark.parametrize("axes", [[2.0, 2.0, 2.0, 2.0], [1.0, 1.0, 1.0, 2.0]])
    def test_gradient_flux_of_unit_trace_solution(self, axes):
        dspec = DirichletQuadratic(axes)
        flux = qd.surface_integral(dspec, lambda fr: fr.pgrad_norm, qd.QuadratureSpec(order=28))
        vol = qd.volume(dspec, qd.QuadratureSpec(order=28))
        assert abs(flux.value - 2 * vol.value) / (2 * vol.value) < 1e-7


class TestDeterminism:
    def test_bitwise_identical_across_runs_and_workers(self):
        spec = sf.Ellipsoid([1.0, 1.3, 0.8, 1.1])
        field = lambda fr: cv.levi(fr, 1)
        qd.clear_root_cache()
        v1 = qd.surface_integral(spec, field, Q16).value
        qd.clear_root_cache()
        v2 = qd.surface_integral(spec, field, Q16).value
        old = os.environ.get("LEVILAB_THREADS")
        try:
            os.environ["LEVILAB_THREADS"] = "3"
            qd.clear_root_cache()
            v3 = qd.surface_integral(spec, field, Q16).value
        finally:
            if old is None:
                os.environ.pop("LEVILAB_THREADS", None)
            else:
                os.environ["LEVILAB_THREADS"] = old
        assert v1 == v2 == v3

    def test_mc_deterministic_given_seed(self):
        spec = sf.Sphere(1.0)
        q = qd.QuadratureSpec(method="mc", samples=20_000, seed=3)
        v1 = qd.volume(spec, q).value
        qd.clear_root_cache()
        v2 = qd.volume(spec, q).value
        assert v1 == v2


class TestErrors:
    def test_no_star_center(self):
        with pytest.raises(StarShapeError):
            qd.volume(sf.Cylinder(1.0), Q16)

    def test_band_profile_not_integrable(self):
        spec = sf.ReinhardtSurface(0.5, 4.0, fp0=-1.0, s0=1.0, smax=2.0)
        with pytest.raises(StarShapeError):
            qd.volume(spec, Q16)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            qd.QuadratureSpec(method="simpson")
        with pytest.raises(ValueError):
            qd.QuadratureSpec(method="mc", samples=10)
