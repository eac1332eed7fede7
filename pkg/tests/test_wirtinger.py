import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levilab.errors import CostLimitError
from levilab.wirtinger import (
    WMatrix,
    WPoly,
    check_euler_sigma,
    check_lemma_identity,
    check_null_lagrangian,
    complex_hessian,
    generic_poly,
    generic_real_poly,
    run_identity_suite,
    sym_bordered_det,
    sym_sigma,
    sym_sigma_grad,
    wd,
)


def var(n, which, i):
    return WPoly.variable(n, which, i)


def norm_sq(n):
    total = WPoly.zero(n)
    for i in range(1, n + 1):
        total = total + var(n, "z", i) * var(n, "zbar", i)
    return total


class TestDerivatives:
    def test_product_rule_on_independent_vars(self):
        p = var(2, "z", 1) * var(2, "zbar", 1)
        assert wd(p, "z", 1) == var(2, "zbar", 1)

    def test_holomorphic_killed_by_zbar(self):
        p = var(2, "z", 1) * var(2, "z", 1)
        assert wd(p, "zbar", 1).is_zero()

    def test_hessian_of_norm_squared_is_identity(self):
        p = norm_sq(2)
        for i in (1, 2):
            for k in (1, 2):
                d = p.wd("z", i).wd("zbar", k)
                expected = WPoly.constant(2, 1) if i == k else WPoly.zero(2)
                assert d == expected

    def test_index_range(self):
        with pytest.raises(ValueError):
            wd(norm_sq(2), "z", 3)
        with pytest.raises(ValueError):
            wd(norm_sq(2), "w", 1)

    def test_mixed_partials_commute(self):
        rng = random.Random(4)
        p = generic_poly(2, 3, rng)
        a = p.wd("z", 1).wd("zbar", 2)
        b = p.wd("zbar", 2).wd("z", 1)
        assert a == b


class TestConjugation:
    def test_involution(self):
        rng = random.Random(8)
        p = generic_poly(2, 3, rng)
        assert p.conj().conj() == p

    def test_conj_multiplicative(self):
        rng = random.Random(9)
        p = generic_poly(2, 2, rng)
        q = generic_poly(2, 2, random.Random(10))
        assert (p * q).conj() == p.conj() * q.conj()

    def test_real_poly_hessian_hermitian(self):
        f = generic_real_poly(3, 3, seed=123)
        assert f.is_real()
        h = complex_hessian(f)
        for l in range(3):
            for k in range(3):
                assert h.entries[l][k].conj() == h.entries[k][l]


class TestRingAxioms:
    small = st.integers(min_value=-4, max_value=4)

    @st.composite
    @staticmethod
    def polys(draw, n=2, max_terms=4):
        terms = {}
        for _ in range(draw(st.integers(1, max_terms))):
            exps = tuple(draw(TestRingAxioms.small.map(abs)) % 3 for _ in range(2 * n))
            re = Fraction(draw(TestRingAxioms.small), draw(st.integers(1, 4)))
            im = Fraction(draw(TestRingAxioms.small), draw(st.integers(1, 4)))
            terms[exps] = (re, im)
        return WPoly(n, terms)

    @given(polys(), polys(), polys())
    @settings(max_examples=40)
    def test_distributive_and_associative(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a

    @given(polys())
    @settings(max_examples=20)
    def test_additive_inverse(self, a):
        assert (a - a).is_zero()


class TestBorderedDeterminant:
    def test_sphere_hand_expansion(self):
        # defining polynomial of the round sphere: border kills the constant,
        # the 3x3 determinant collapses to minus the squared gradient norm
        f = norm_sq(2) - WPoly.constant(2, 4)
        assert sym_bordered_det(f, (1, 2)) == -norm_sq(2)

    def test_pluriharmonic_vanishes(self):
        z1 = var(2, "z", 1)
        p = z1 * z1
        f = p + p.conj()
        assert sym_bordered_det(f, (1, 2)).is_zero()

    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError):
            sym_bordered_det(norm_sq(2), (1, 1))

    def test_matches_numeric_bordered_minor(self):
        # cross-module oracle: exact symbolic determinant evaluated at random
        # points against the floating computation from jets
        from levilab import curvature as cv
        from levilab import surfaces as sf

        rng = random.Random(77)
        p = generic_poly(2, 2, rng)
        f = p + p.conj()
        sym = sym_bordered_det(f, (1, 2))
        spec = sf.UserPolynomial(1, f.coefficients_as_complex(), validate=False)
        nrng = np.random.default_rng(5)
        for _ in range(10):
            x = nrng.standard_normal(4)
            z = [complex(x[0], x[1]), complex(x[2], x[3])]
            jt = sf.eval_jets(spec, x[None, :])
            wg = cv.wirtinger_gradient(jt.grad)
            wh = cv.complex_hessian(jt.hess)
            num = cv.bordered_minor(wg, wh, (1, 2))[0]
            assert abs(sym.eval(z) - num) < 1e-12 * max(1.0, abs(num))


class TestSigmaSymbolic:
    def test_euler_for_sigma_grad(self):
        f = generic_real_poly(2, 3, seed=55)
        h = complex_hessian(f)
        for j in (1, 2):
            sig = sym_sigma(h, j)
            grad = sym_sigma_grad(h, j)
            total = WPoly.zero(2)
            for l in range(2):
                for k in range(2):
                    total = total + grad[l][k] * h.entries[l][k]
            assert (total - sig * j).is_zero()

    def test_wmatrix_det_2x2(self):
        a = var(1, "z", 1)
        b = var(1, "zbar", 1)
        m = WMatrix([[a, b], [b, a]])
        assert m.det() == a * a - b * b


class TestIdentityChecks:
    @pytest.mark.parametrize("n,j", [(1, 1), (2, 1), (2, 2)])
    def test_null_lagrangian_zero(self, n, j):
        res = check_null_lagrangian(n, j)
        assert res.ok
        assert len(res.residuals) == n + 1

    @pytest.mark.parametrize("n,j", [(1, 1), (2, 1), (2, 2)])
    def test_lemma_identity_zero(self, n, j):
        assert check_lemma_identity(n, j).ok

    @pytest.mark.parametrize("n,j", [(1, 1), (2, 1), (2, 2)])
    def test_euler_sigma_zero(self, n, j):
        assert check_euler_sigma(n, j).ok

    def test_other_seeds_also_vanish(self):
        for seed in (1, 424242):
            assert check_null_lagrangian(1, 1, seed=seed).ok
            assert check_lemma_identity(1, 1, seed=seed).ok

    def test_cost_bound(self):
        with pytest.raises(CostLimitError):
            check_null_lagrangian(4, 1)

    def test_j_range(self):
        with pytest.raises(ValueError):
            check_euler_sigma(2, 3)

    def test_suite_runner(self):
        results = run_identity_suite(1)
        assert len(results) == 3
        assert all(r.ok for r in results)


def test_eval_exactness():
    f = norm_sq(2) - WPoly.constant(2, 4)
    assert f.eval([2.0, 0.0]) == 0.0
    assert f.eval([1.0 + 1.0j, 1.0 - 1.0j]) == pytest.approx(0.0, abs=1e-15)
