"""Cutoff and graded-norm tests: frozen weight integrals, partition exactness,
and the empirical ratio-boundedness protocols for the norm equivalences."""

import numpy as np
import pytest

from starwave.errors import ResolutionError
from starwave.norms import (
    OMEGA,
    bracket_seminorm,
    build_graded_report,
    cutoff_split,
    fornberg_weights,
    grade_inf,
    grade_two,
    graded_norm,
    norm_mu,
    pair_grade,
    pair_grade_pointwise,
    pair_grade_sup,
    sup_norm,
    time_derivative,
)
from starwave.quadrature import SpectralField, get_basis
from starwave.timefields import StatePair, TimeField, TimeGrid


def band_limited(basis, rng, k_max=10, decay=2.0):
    c = np.zeros(basis.size)
    c[:k_max] = rng.normal(size=k_max) * np.exp(-np.arange(k_max) / decay)
    return SpectralField(basis, c)


def trig_time_field(basis, grid, rng, k_max=6, n_terms=3, omega_max=4.0):
    coeffs = np.zeros((grid.n_steps + 1, basis.size))
    t = grid.times
    for _ in range(n_terms):
        k = rng.integers(0, k_max)
        om = rng.uniform(0.3, omega_max)
        ph = rng.uniform(0, 2 * np.pi)
        amp = rng.normal()
        coeffs[:, k] += amp * np.cos(om * t + ph)
    return TimeField(basis, grid, coeffs)


class TestOmega:
    def test_plateaus_exact(self):
        x = np.array([0.0, 0.1, 1.0 / 3.0, 2.0 / 3.0, 0.9, 1.0])
        w = OMEGA(x)
        assert np.all(w[:3] == 1.0)
        assert np.all(w[3:] == 0.0)

    def test_strictly_between_on_transition(self):
        x = np.array([0.35, 0.45, 0.5, 0.55, 0.65])
        w = OMEGA(x)
        assert np.all((w > 0) & (w < 1))
        assert OMEGA(0.4) > OMEGA(0.6)

    def test_derivatives_vanish_on_plateaus(self):
        x = np.array([0.0, 0.2, 1.0 / 3.0, 2.0 / 3.0, 0.8, 1.0])
        assert np.all(OMEGA.deriv(x, 1) == 0.0)
        assert np.all(OMEGA.deriv(x, 2) == 0.0)

    def test_derivative_matches_finite_difference(self):
        xs = np.linspace(0.36, 0.64, 15)
        h = 1e-6
        fd = (OMEGA(xs + h) - OMEGA(xs - h)) / (2 * h)
        assert np.max(np.abs(OMEGA.deriv(xs, 1) - fd)) < 1e-5
        fd2 = (OMEGA(xs + h) - 2 * OMEGA(xs) + OMEGA(xs - h)) / h ** 2
        assert np.max(np.abs(OMEGA.deriv(xs, 2) - fd2)) < 1e-3 * max(1, np.abs(fd2).max())


class TestCutoffSplit:
    def test_plateau_values(self, basis_n6):
        # plateau behavior is exact at the quadrature nodes (the pieces are
        # polynomials off-node, with the cutoff's projection tail)
        u = SpectralField.from_callable(basis_n6, lambda x: np.ones_like(x))
        u0, u1 = cutoff_split(u)
        nodes = basis_n6.rule.nodes
        low = nodes <= 1.0 / 3.0
        high = nodes >= 2.0 / 3.0
        assert np.all(u0.values[low] == u.values[low])
        assert np.all(u1.values[low] == 0.0)
        assert np.all(u0.values[high] == 0.0)
        assert np.all(u1.values[high] == u.values[high])

    def test_partition_exact_at_nodes(self, basis_n6, rng):
        u = band_limited(basis_n6, rng)
        u0, u1 = cutoff_split(u)
        # split as (w*u, u - w*u): partition exact to one rounding
        err = np.abs(u0.values + u1.values - u.values)
        assert np.max(err) <= 2 * np.finfo(float).eps * np.max(np.abs(u.values))

    def test_supports(self, basis_n6, rng):
        u = band_limited(basis_n6, rng)
        u0, u1 = cutoff_split(u)
        nodes = basis_n6.rule.nodes
        assert np.all(u0.values[nodes >= 2.0 / 3.0] == 0.0)
        assert np.all(u1.values[nodes <= 1.0 / 3.0] == 0.0)


class TestWeightedNorms:
    def test_constant_mu0(self, basis_n6):
        u = SpectralField.from_callable(basis_n6, lambda x: np.ones_like(x))
        assert norm_mu(u, 0) == pytest.approx(np.sqrt(2.0 / 5.0), rel=1e-12)

    def test_constant_mu1(self, basis_n6):
        u = SpectralField.from_callable(basis_n6, lambda x: np.ones_like(x))
        assert norm_mu(u, 1) == pytest.approx(np.sqrt(1.0 / 3.0), rel=1e-12)

    def test_brackets_vanish_on_constants(self, basis_n6):
        # exact coefficient representation of u = 1 (analyze() would inject
        # 1e-17 tails that high operator powers amplify)
        c = np.zeros(basis_n6.size)
        c[0] = np.sqrt(16.0 / 315.0)
        u = SpectralField(basis_n6, c)
        for mu in (0, 1):
            for ell in (1, 2, 3, 4):
                assert bracket_seminorm(u, mu, ell) < 1e-12

    def test_bracket_even_oracle(self, basis_n6):
        # <x>_[0]2 = ||Delta_0 x||_[0] = ||5/2||_[0] = 2.5*sqrt(2/5)
        u = SpectralField.from_callable(basis_n6, lambda x: x)
        assert bracket_seminorm(u, 0, 2) == pytest.approx(2.5 * np.sqrt(0.4), rel=1e-8)

    def test_bracket_odd_oracle(self, basis_n6):
        # <x>_[0]1 = ||sqrt(x)*1||_[0] = sqrt(int x^{5/2}) = sqrt(2/7)
        u = SpectralField.from_callable(basis_n6, lambda x: x)
        assert bracket_seminorm(u, 0, 1) == pytest.approx(np.sqrt(2.0 / 7.0), rel=1e-10)

    def test_sup_norm(self, basis_n6):
        u = SpectralField.from_callable(basis_n6, lambda x: x * (1 - x))
        assert sup_norm(u) == pytest.approx(0.25, abs=1e-4)


class TestTimeDerivative:
    def test_fornberg_second_order_weights(self):
        w = fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2)
        assert np.allclose(w[:, 2], [1.0, -2.0, 1.0])
        assert np.allclose(w[:, 1], [-0.5, 0.0, 0.5])

    def test_polynomial_exactness(self):
        t = np.linspace(0, 1, 21)
        vals = (t ** 4)[:, None]
        sl, d2 = time_derivative(vals, t[1] - t[0], 2, 4)
        assert np.max(np.abs(d2[:, 0] - 12 * t[sl] ** 2)) < 1e-10

    def test_trig_accuracy(self):
        grid = TimeGrid(1.0, 200)
        t = grid.times
        vals = np.cos(3 * t)[:, None]
        sl, d4 = time_derivative(vals, grid.dt, 4, 6)
        assert np.max(np.abs(d4[:, 0] - 81 * np.cos(3 * t[sl]))) < 1e-5

    def test_grid_too_short(self):
        vals = np.zeros((5, 2))
        with pytest.raises(ResolutionError):
            time_derivative(vals, 0.1, 4, 8)


class TestGrades:
    def test_constant_field_grade0(self, basis_n6_small):
        grid = TimeGrid(1.0, 40)
        u = TimeField.from_callable(basis_n6_small, grid, lambda t, x: np.ones_like(x))
        assert grade_inf(u, 0) == pytest.approx(1.0, abs=1e-9)
        # (2)-grade over both weights: sqrt(T*(2/5) + T*(1/3))
        assert grade_two(u, 0) == pytest.approx(np.sqrt(0.4 + 1.0 / 3.0), rel=1e-10)

    def test_composite_monotone_in_n(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 80)
        u = trig_time_field(basis_n6_small, grid, rng)
        vals_inf = [grade_inf(u, n) for n in range(3)]
        vals_two = [grade_two(u, n) for n in range(3)]
        assert vals_inf[0] <= vals_inf[1] <= vals_inf[2]
        assert vals_two[0] <= vals_two[1] <= vals_two[2]

    def test_pair_grades_run(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 80)
        h = trig_time_field(basis_n6_small, grid, rng)
        k = trig_time_field(basis_n6_small, grid, rng)
        pair = StatePair(h, k)
        assert pair_grade_sup(pair, 1) > 0
        assert graded_norm(pair, "pair_int_n", 1) > 0
        assert pair_grade_pointwise(pair, 1) > 0

    def test_pair_k_spatial(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 8)
        h = trig_time_field(basis_n6_small, grid, rng)
        k = trig_time_field(basis_n6_small, grid, rng)
        pair = StatePair(h, k)
        assert pair_grade(pair, 1) > 0
        assert graded_norm(pair, "pair_k", 2) >= graded_norm(pair, "pair_k", 1)

    def test_report_structure(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 60)
        u = trig_time_field(basis_n6_small, grid, rng)
        rep = build_graded_report(u, 2)
        d = rep.to_dict()
        assert len(d["sup_table"]) == 2 * 6  # (j,k) with j+k<=2, two mus
        assert all(v >= 0 for v in d["sup_table"].values())
        assert d["time_grid"]["n_steps"] == 60


class TestEquivalenceProtocols:
    """Empirical ratio-boundedness versions of the norm-equivalence claims."""

    def _family(self, basis, grid, rng, count):
        return [trig_time_field(basis, grid, rng) for _ in range(count)]

    def test_two_vs_inf_equivalence(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 120)
        n, s = 1, 3  # 2s > 1 + max(N,5)/2 = 4 for N=6
        fields = self._family(basis_n6_small, grid, rng, 50)
        lo_ratios, hi_ratios = [], []
        for u in fields:
            g2 = grade_two(u, n)
            ginf = grade_inf(u, n)
            g2s = grade_two(u, n + s)
            if ginf > 1e-12:
                lo_ratios.append(g2 / ginf)
                hi_ratios.append(ginf / g2s)
        lo, hi = np.array(lo_ratios), np.array(hi_ratios)
        assert np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))
        # stability under doubling the sample: the spread doesn't explode
        half_lo = lo[:25]
        assert lo.max() <= 2.0 * max(half_lo.max(), 1e-12) + 1e-12
        assert hi.max() < np.inf

    def test_pointwise_vs_inf_equivalence(self, basis_n6_small, rng):
        grid = TimeGrid(1.0, 120)
        m = 1
        ratios = []
        for _ in range(30):
            h = trig_time_field(basis_n6_small, grid, rng)
            k = trig_time_field(basis_n6_small, grid, rng)
            pair = StatePair(h, k)
            p = pair_grade_pointwise(pair, 2 * m)
            ginf = max(grade_inf(h, m), grade_inf(k, m))
            if ginf > 1e-12:
                ratios.append(p / ginf)
        r = np.array(ratios)
        assert np.all(np.isfinite(r))
        assert r.max() / r.min() < 1e4  # bounded both ways on the family

    def test_support_bound_protocol(self, basis_n6, rng):
        # fields supported in [1/6, 5/6]: Delta_mu powers controlled by the
        # opposite-endpoint family
        from starwave.norms import _delta_matrix, _sup_tables
        from starwave.transform import SmoothBump
        ratios = []
        for _ in range(12):
            a = rng.uniform(1.0 / 6.0 + 0.02, 0.35)
            b = rng.uniform(0.55, 5.0 / 6.0 - 0.02)
            bump = SmoothBump(a, b, amplitude=rng.uniform(0.5, 2.0))
            u = SpectralField.from_callable(basis_n6, bump)
            for mu in (0, 1):
                m = 2
                num_c = u.coeffs.copy()
                dm = _delta_matrix(u.basis, mu)
                for _ in range(m):
                    num_c = dm @ num_c
                num = sup_norm(SpectralField(u.basis, num_c))
                den = 0.0
                do = _delta_matrix(u.basis, 1 - mu)
                c = u.coeffs.copy()
                for k in range(m + 1):
                    den += sup_norm(SpectralField(u.basis, c))
                    c = do @ c
                ratios.append(num / den)
        r = np.array(ratios)
        assert np.all(np.isfinite(r))
        assert r.max() < 50.0
