"""Eigensolver tests against the closed-form Jacobi spectrum and the
potential-asymptote constants."""

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from starwave.errors import ResolutionError
from starwave.operators import CoefficientFns, assemble_L, gram_weighted
from starwave.quadrature import get_basis
from starwave.spectrum import (
    boundary_constants,
    build_liouville,
    first_positive_eigenvalue,
    liouville_potential,
    liouville_xi,
    solve_eigen,
)


@pytest.fixture(scope="module")
def pairs_n6():
    basis = get_basis(6.0, size=64)
    c = CoefficientFns.zero(6.0)
    return solve_eigen(assemble_L(basis, c), c, 12), c, basis


class TestEigen:
    def test_closed_form_eigenvalues(self, pairs_n6):
        pairs, _, _ = pairs_n6
        lams = np.array([p.lam for p in pairs[:4]])
        assert np.allclose(lams, [0.0, 5.5, 13.0, 22.5], atol=1e-9)

    def test_constant_shift(self):
        basis = get_basis(6.0, size=48)
        c = CoefficientFns(Polynomial([0.0]), Polynomial([1.0]), 6.0)
        pairs = solve_eigen(assemble_L(basis, c), c, 4)
        lams = np.array([p.lam for p in pairs])
        assert np.allclose(lams, np.array([0.0, 5.5, 13.0, 22.5]) + 1.0, atol=1e-9)

    def test_simple_increasing(self, pairs_n6):
        pairs, _, _ = pairs_n6
        lams = np.array([p.lam for p in pairs])
        assert np.all(np.diff(lams) > 0)

    def test_indexing_one_based(self, pairs_n6):
        pairs, _, _ = pairs_n6
        assert pairs[0].index == 1 and pairs[0].galerkin_index == 0

    def test_residuals_small(self, pairs_n6):
        pairs, _, _ = pairs_n6
        assert max(p.residual for p in pairs) < 1e-6

    def test_rayleigh_quotient(self, pairs_n6):
        pairs, c, basis = pairs_n6
        from starwave.operators import symmetrized_form
        S = symmetrized_form(basis, c)
        G = gram_weighted(basis, c)
        for p in pairs[:6]:
            v = p.phi.coeffs
            rq = (v @ S @ v) / (v @ G @ v)
            assert rq == pytest.approx(p.lam, abs=1e-8 * max(1.0, abs(p.lam)))

    def test_orthogonality(self, pairs_n6):
        pairs, c, basis = pairs_n6
        G = gram_weighted(basis, c)
        for i in range(6):
            for j in range(i + 1, 6):
                ip = pairs[i].phi.coeffs @ G @ pairs[j].phi.coeffs
                assert abs(ip) < 1e-8

    def test_resolution_guard(self):
        basis = get_basis(6.0, size=16)
        c = CoefficientFns.zero(6.0)
        with pytest.raises(ResolutionError):
            solve_eigen(assemble_L(basis, c), c, 8)

    def test_grid_refinement_cauchy(self):
        # polynomial ell1, L0: lambda_n stable between sizes 64 and 96
        c = CoefficientFns(Polynomial([0.2, -0.1]), Polynomial([0.3, 0.1]), 6.0)
        lams = {}
        for size in (64, 96):
            basis = get_basis(6.0, size=size)
            pairs = solve_eigen(assemble_L(basis, c), c, 8)
            lams[size] = np.array([p.lam for p in pairs])
        assert np.max(np.abs(lams[64] - lams[96])) < 1e-7

    def test_first_positive(self, pairs_n6):
        pairs, _, _ = pairs_n6
        p = first_positive_eigenvalue(pairs)
        assert p.lam == pytest.approx(5.5, abs=1e-9)


class TestLiouville:
    def test_xi_values(self):
        assert liouville_xi(0.5) == pytest.approx(0.0, abs=1e-15)
        assert liouville_xi(0.0) == pytest.approx(-np.pi / 2)
        assert liouville_xi(1.0) == pytest.approx(np.pi / 2)

    def test_potential_asymptote_left(self):
        c = CoefficientFns.zero(6.0)
        x = 1e-6
        val = (liouville_xi(x) + np.pi / 2) ** 2 * liouville_potential(c, x)
        assert abs(val - 2.0) < 0.01 * 2.0

    def test_potential_asymptote_right(self):
        c = CoefficientFns.zero(6.0)
        x = 1.0 - 1e-6
        val = (np.pi / 2 - liouville_xi(x)) ** 2 * liouville_potential(c, x)
        assert abs(val - 3.75) < 0.01 * 3.75

    @pytest.mark.parametrize("n_param", [5.0, 6.0, 8.0])
    def test_right_constant_formula(self, n_param):
        c = CoefficientFns.zero(n_param)
        x = 1.0 - 1e-7
        val = (np.pi / 2 - liouville_xi(x)) ** 2 * liouville_potential(c, x)
        expected = (n_param - 1.0) * (n_param - 3.0) / 4.0
        assert abs(val - expected) < 0.01 * expected

    def test_monotone_convergence_last_decade(self):
        c = CoefficientFns.zero(6.0)
        xs = np.array([1e-5, 3e-6, 1e-6])
        vals = (liouville_xi(xs) + np.pi / 2) ** 2 * liouville_potential(c, xs)
        errs = np.abs(vals - 2.0)
        assert np.all(np.diff(errs) < 0)
        xs = 1.0 - np.array([1e-5, 3e-6, 1e-6])
        vals = (np.pi / 2 - liouville_xi(xs)) ** 2 * liouville_potential(c, xs)
        errs = np.abs(vals - 3.75)
        assert np.all(np.diff(errs) < 0)

    def test_endpoint_rejected(self):
        c = CoefficientFns.zero(6.0)
        with pytest.raises(ValueError):
            liouville_potential(c, 0.0)
        with pytest.raises(ValueError):
            liouville_potential(c, 1.0)

    def test_build_liouville(self):
        c = CoefficientFns.zero(6.0)
        data = build_liouville(c, np.linspace(0.05, 0.95, 10))
        assert np.all(data.sym_m == 1.0)
        assert np.all(data.sym_a > 0)
        assert data.xi[0] < 0 < data.xi[-1]

    def test_m_positive_with_ell1(self):
        c = CoefficientFns(Polynomial([0.4, 0.3]), Polynomial([0.0]), 6.0)
        data = build_liouville(c, np.linspace(0.01, 0.99, 20))
        assert np.all(data.sym_m > 0)


class TestBoundaryConstants:
    def test_constant_eigenfunction(self, pairs_n6):
        pairs, _, _ = pairs_n6
        c0, c1, slope0 = boundary_constants(pairs[0])
        # lambda=0 eigenfunction is the normalized constant
        assert c0 == pytest.approx(c1, rel=1e-9)
        assert abs(c0) > 1e-8
        assert abs(slope0) < 1e-6

    def test_first_nontrivial_nonzero_constants(self, pairs_n6):
        pairs, _, _ = pairs_n6
        c0, c1, slope0 = boundary_constants(pairs[1])
        assert abs(c0) > 1e-8
        assert abs(c1) > 1e-8

    def test_ratio_bounded_near_zero(self, pairs_n6):
        # Phi(x) - C0 = O(x): the ratio stays bounded as x -> 0
        pairs, _, _ = pairs_n6
        p = pairs[1]
        c0, _, _ = boundary_constants(p)
        xs = np.array([1e-2, 1e-3, 1e-4])
        ratios = np.abs(p.phi(xs) - c0) / xs
        assert np.max(ratios) < 10.0 * max(np.abs(ratios[0]), 1.0)

    def test_sign_convention(self, pairs_n6):
        pairs, _, _ = pairs_n6
        for p in pairs[:5]:
            assert p.phi(0.0) > 0
