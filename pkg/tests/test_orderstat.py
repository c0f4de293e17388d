import math

import numpy as np
import pytest
from scipy import integrate

from coopnoma.orderstat import (MAX_USERS, OrderStatSpec, ordered_cdf, ordered_pdf,
                                phi_coefficient, sample_ordered_gains)


def test_spec_validation():
    OrderStatSpec(M=6, i=3, lam=1.0)  # fine
    with pytest.raises(ValueError):
        OrderStatSpec(M=6, i=0, lam=1.0)
    with pytest.raises(ValueError):
        OrderStatSpec(M=6, i=7, lam=1.0)
    with pytest.raises(ValueError):
        OrderStatSpec(M=6, i=3, lam=0.0)
    with pytest.raises(ValueError):
        OrderStatSpec(M=0, i=1, lam=1.0)
    with pytest.raises(ValueError):
        OrderStatSpec(M=MAX_USERS + 1, i=1, lam=1.0)


class TestPhiCoefficient:
    def test_first_term_is_count_of_upper_subsets(self):
        # k = 0 term weight is C(M, i-1): the minimum-rank case collapses to 1.
        assert phi_coefficient(0, 1, 6) == 1.0
        assert phi_coefficient(0, 6, 6) == 6.0
        assert phi_coefficient(1, 6, 6) == -15.0

    def test_signs_alternate(self):
        for k in range(6):
            c = phi_coefficient(k, 6, 6)
            assert math.copysign(1.0, c) == (1.0 if k % 2 == 0 else -1.0)

    @pytest.mark.parametrize("M", [1, 2, 5, 12, 20])
    def test_sum_is_exactly_one(self, M):
        # The weights telescope: summed over k they give exactly 1, and the
        # integer-valued terms make the float sum exact too.
        for i in range(1, M + 1):
            total = math.fsum(phi_coefficient(k, i, M) for k in range(i))
            assert total == 1.0

    def test_values_are_integers(self):
        for M in range(1, MAX_USERS + 1):
            for i in range(1, M + 1):
                for k in range(i):
                    c = phi_coefficient(k, i, M)
                    assert c == int(c)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            phi_coefficient(-1, 3, 6)
        with pytest.raises(ValueError):
            phi_coefficient(3, 3, 6)  # k must be <= i-1
        with pytest.raises(ValueError):
            phi_coefficient(0, 0, 6)
        with pytest.raises(ValueError):
            phi_coefficient(0, 1, MAX_USERS + 1)


class TestOrderedCdf:
    def test_boundaries(self):
        spec = OrderStatSpec(M=6, i=3, lam=1.0)
        assert ordered_cdf(spec, 0.0) == 0.0
        assert ordered_cdf(spec, 200.0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("M", [1, 2, 6, 13, 20])
    def test_extreme_ranks_match_closed_forms(self, M):
        # min of M exponentials is exponential with rate M/lam; max is the
        # M-th power of the parent CDF.
        lam = 0.7
        x = np.logspace(-4, 1, 40)
        lo = ordered_cdf(OrderStatSpec(M=M, i=1, lam=lam), x)
        hi = ordered_cdf(OrderStatSpec(M=M, i=M, lam=lam), x)
        assert np.max(np.abs(lo - (-np.expm1(-M * x / lam)))) < 1e-12
        assert np.max(np.abs(hi - (-np.expm1(-x / lam)) ** M)) < 1e-12

    def test_matches_alternating_expansion(self):
        # Cross-check the stable binomial-tail evaluation against the signed
        # expansion that the closed-form outage expressions use directly.
        lam = 1.3
        for M, i in [(6, 3), (8, 4), (10, 7)]:
            spec = OrderStatSpec(M=M, i=i, lam=lam)
            for x in (0.05, 0.3, 1.0, 4.0):
                expansion = math.fsum(
                    phi_coefficient(k, i, M)
                    * -math.expm1(-(M - i + k + 1) * x / lam)
                    for k in range(i))
                assert ordered_cdf(spec, x) == pytest.approx(expansion, abs=2e-11)

    def test_monotone_in_x_and_rank(self):
        x = np.linspace(0.0, 8.0, 200)
        prev = None
        for i in range(1, 7):
            F = ordered_cdf(OrderStatSpec(M=6, i=i, lam=1.0), x)
            assert np.all(np.diff(F) >= -1e-15)
            if prev is not None:
                # higher rank = stochastically larger gain = smaller CDF
                assert np.all(F <= prev + 1e-15)
            prev = F

    def test_negative_argument_rejected(self):
        spec = OrderStatSpec(M=6, i=3, lam=1.0)
        with pytest.raises(ValueError):
            ordered_cdf(spec, -0.1)


class TestOrderedPdf:
    def test_density_at_origin(self):
        # Only the minimum has mass at 0: M/lam there, 0 for every other rank.
        assert ordered_pdf(OrderStatSpec(M=6, i=1, lam=1.0), 0.0) == pytest.approx(6.0)
        assert ordered_pdf(OrderStatSpec(M=6, i=6, lam=1.0), 0.0) == 0.0

    @pytest.mark.parametrize("i", [1, 3, 6])
    def test_integrates_to_one(self, i):
        spec = OrderStatSpec(M=6, i=i, lam=1.0)
        total, err = integrate.quad(lambda x: ordered_pdf(spec, x), 0.0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("i", [1, 2, 5])
    def test_is_derivative_of_cdf(self, i):
        spec = OrderStatSpec(M=8, i=i, lam=0.9)
        h = 1e-6
        for x in (0.1, 0.5, 1.0, 2.5):
            num = (ordered_cdf(spec, x + h) - ordered_cdf(spec, x - h)) / (2 * h)
            assert ordered_pdf(spec, x) == pytest.approx(num, rel=1e-6, abs=1e-9)

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            ordered_pdf(OrderStatSpec(M=6, i=3, lam=1.0), [-1.0, 0.5])


class TestSampler:
    def test_deterministic_for_fixed_seed(self):
        a = sample_ordered_gains(6, 1.0, np.random.default_rng(42))
        b = sample_ordered_gains(6, 1.0, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_sorted_and_nonnegative(self):
        rng = np.random.default_rng(1)
        g = sample_ordered_gains(10, 2.0, rng, size=500)
        assert g.shape == (500, 10)
        assert np.all(g >= 0)
        assert np.all(np.diff(g, axis=1) >= 0)

    def test_single_draw_shape(self):
        g = sample_ordered_gains(4, 1.0, np.random.default_rng(3))
        assert g.shape == (4,)

    def test_rank_means_match_harmonic_formula(self):
        # E[rank i of M] = lam * sum_{j=M-i+1}^{M} 1/j; check at 2e5 draws.
        rng = np.random.default_rng(2024)
        M, lam, draws = 6, 1.5, 200_000
        g = sample_ordered_gains(M, lam, rng, size=draws)
        for i in (1, 3, 6):
            want = lam * sum(1.0 / j for j in range(M - i + 1, M + 1))
            got = g[:, i - 1].mean()
            # generous 5-sigma band using the sample std
            tol = 5 * g[:, i - 1].std() / math.sqrt(draws)
            assert abs(got - want) < tol

    def test_empirical_cdf_tracks_ordered_cdf(self):
        rng = np.random.default_rng(99)
        spec = OrderStatSpec(M=6, i=3, lam=1.0)
        draws = sample_ordered_gains(6, 1.0, rng, size=100_000)[:, 2]
        draws.sort()
        grid = np.linspace(0.05, 4.0, 50)
        emp = np.searchsorted(draws, grid, side="right") / draws.size
        assert np.max(np.abs(emp - ordered_cdf(spec, grid))) < 0.006

    def test_invalid_arguments(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_ordered_gains(0, 1.0, rng)
        with pytest.raises(ValueError):
            sample_ordered_gains(6, -1.0, rng)
        with pytest.raises(ValueError):
            sample_ordered_gains(6, 1.0, rng, size=0)
