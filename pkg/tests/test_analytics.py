import math

import mpmath
import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from chasescape import (
    InitMode,
    LimitRegime,
    ParameterError,
    classify_regime,
    conversion_growth_limit,
    exact_distribution_W,
    expected_Z,
    expected_excess_closed,
    expected_excess_quadrature,
    expected_white_limit,
    extinction_limit,
    gamma_cdf,
    prob_gamma_less_exp_closed,
    prob_gamma_less_exp_quadrature,
    stats_ks,
    stats_ks_two_sample,
    stats_wilson_ci,
)
from chasescape.analytics import (
    chi_square_gof,
    regularized_gamma_p,
    regularized_gamma_q,
)

ALPHA_GRID = (0.1, 0.3, 1.0, 2.0, 2.5, 4.0, 8.0)


class TestClosedForms:
    def test_regime_trichotomy_is_exact(self):
        assert classify_regime(0.999999999) is LimitRegime.SUBCRITICAL
        assert classify_regime(1.0) is LimitRegime.CRITICAL
        assert classify_regime(1.000000001) is LimitRegime.SUPERCRITICAL

    def test_extinction_limit(self):
        assert extinction_limit(0.5, 3.0) == 0.0
        assert extinction_limit(1.0, 1.0) == 0.5
        assert extinction_limit(1.0, 3.0) == 0.125
        assert extinction_limit(2.0, 0.1) == 1.0

    def test_expected_white_limit(self):
        assert expected_white_limit(1.0) == 2.0
        assert expected_white_limit(3.0) == 6.0
        assert expected_white_limit(0.5) == 1.0

    def test_conversion_growth_limit(self):
        assert conversion_growth_limit(4.0) == 4.0
        assert conversion_growth_limit(0.1) == 0.1

    def test_gamma_vs_exp_closed(self):
        assert prob_gamma_less_exp_closed(1.0) == 0.5
        assert prob_gamma_less_exp_closed(2.0) == 0.25
        assert prob_gamma_less_exp_closed(0.5) == pytest.approx(0.7071067811865476, abs=1e-15)

    def test_expected_excess_closed(self):
        assert expected_excess_closed(1.0) == 0.5
        assert expected_excess_closed(2.0) == 1.25
        assert expected_excess_closed(1e-9) == pytest.approx(0.0, abs=1e-8)

    def test_expected_Z_is_alpha(self):
        for alpha in ALPHA_GRID:
            assert expected_Z(alpha) == pytest.approx(alpha, abs=1e-12)


class TestQuadratureOracles:
    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_gamma_vs_exp_matches_closed_form(self, alpha):
        assert abs(
            prob_gamma_less_exp_quadrature(alpha) - prob_gamma_less_exp_closed(alpha)
        ) < 1e-8

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_excess_matches_closed_form(self, alpha):
        assert abs(expected_excess_quadrature(alpha) - expected_excess_closed(alpha)) < 1e-8

    def test_quadrature_would_catch_a_broken_closed_form(self):
        # fault injection: a wrong constant must trip the cross-check
        broken = 2.0 ** -(3.7 * 1.01)
        assert abs(prob_gamma_less_exp_quadrature(3.7) - broken) > 1e-8


class TestRegularizedGamma:
    @pytest.mark.parametrize("a", (0.3, 1.0, 2.5, 7.0, 30.0))
    @pytest.mark.parametrize("x", (0.01, 0.5, 1.0, 3.0, 10.0, 40.0))
    def test_matches_scipy(self, a, x):
        assert regularized_gamma_p(a, x) == pytest.approx(
            float(scipy.special.gammainc(a, x)), abs=1e-12
        )

    @pytest.mark.parametrize("alpha", (0.5, 1.0, 2.0, 3.5))
    @pytest.mark.parametrize("x", (0.2, 1.0, 2.5, 6.0))
    def test_cdf_matches_density_quadrature(self, alpha, x):
        # tanh-sinh quadrature absorbs the endpoint singularity for alpha < 1
        density = lambda t: mpmath.power(t, alpha - 1) * mpmath.exp(-t) / mpmath.gamma(alpha)
        grid = float(mpmath.quad(density, [0, x]))
        assert abs(gamma_cdf(x, alpha) - grid) < 1e-9

    def test_boundaries(self):
        assert regularized_gamma_p(2.0, 0.0) == 0.0
        assert regularized_gamma_q(2.0, 0.0) == 1.0
        assert gamma_cdf(-1.0, 2.0) == 0.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            regularized_gamma_p(-1.0, 2.0)
        with pytest.raises(ParameterError):
            regularized_gamma_p(1.0, -2.0)


class TestExactDistribution:
    def test_two_vertex_hand_enumeration(self):
        dist = exact_distribution_W(1, 1.0, 1.0)
        assert dist.probabilities == pytest.approx([0.5, 0.5], abs=1e-15)
        assert dist.expected_w == pytest.approx(0.5, abs=1e-15)
        assert dist.expected_c == pytest.approx(1.25, abs=1e-15)
        assert dist.extinction_probability == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize(
        "n,lam,alpha", [(10, 1.0, 1.0), (100, 1.0, 4.0), (50, 2.0, 0.5), (37, 0.3, 2.2)]
    )
    def test_instant_conversion_term(self, n, lam, alpha):
        dist = exact_distribution_W(n, lam, alpha)
        assert abs(dist.probabilities[n] - alpha / (lam * n + alpha)) < 1e-12

    def test_kortchemski_equivalence_at_alpha_one(self):
        standard = exact_distribution_W(50, 1.0, 1.0)
        kortchemski = exact_distribution_W(50, 1.0, 0.0, InitMode.KORTCHEMSKI)
        assert np.max(np.abs(standard.probabilities - kortchemski.probabilities)) < 1e-12

    @pytest.mark.parametrize(
        "n,lam,alpha,mode",
        [
            (1, 1.0, 1.0, InitMode.STANDARD),
            (50, 1.0, 2.0, InitMode.STANDARD),
            (200, 0.5, 0.3, InitMode.STANDARD),
            (80, 2.0, 5.0, InitMode.STANDARD),
            (50, 1.0, 0.0, InitMode.KORTCHEMSKI),
            (30, 1.7, 0.0, InitMode.KORTCHEMSKI),
        ],
    )
    def test_normalization(self, n, lam, alpha, mode):
        dist = exact_distribution_W(n, lam, alpha, mode)
        assert abs(float(dist.probabilities.sum()) - 1.0) < 1e-12
        assert np.all(dist.probabilities >= 0)
        assert dist.extinction_probability == dist.probabilities[0]
        assert dist.expected_w == pytest.approx(
            float(np.arange(n + 1) @ dist.probabilities), abs=1e-12
        )

    def test_rejects_oversized_and_invalid(self):
        with pytest.raises(ParameterError):
            exact_distribution_W(5001, 1.0, 1.0)
        with pytest.raises(ParameterError):
            exact_distribution_W(10, 1.0, 0.0)  # standard mode needs alpha > 0
        with pytest.raises(ParameterError):
            exact_distribution_W(10, -1.0, 1.0)


class TestWilsonCI:
    def test_zero_successes(self):
        lo, hi = stats_wilson_ci(0, 100, 0.95)
        assert lo == 0.0  # interval must contain the point estimate 0
        assert hi == pytest.approx(0.037, abs=0.002)

    def test_symmetric_at_half(self):
        lo, hi = stats_wilson_ci(50, 100, 0.95)
        assert lo + hi == pytest.approx(1.0, abs=1e-12)
        assert lo < 0.5 < hi

    def test_all_successes(self):
        lo, hi = stats_wilson_ci(100, 100, 0.95)
        assert hi == 1.0
        assert lo < 1.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            stats_wilson_ci(5, 0, 0.95)
        with pytest.raises(ParameterError):
            stats_wilson_ci(11, 10, 0.95)
        with pytest.raises(ParameterError):
            stats_wilson_ci(1, 10, 1.5)


@given(
    trials=st.integers(1, 10000),
    frac=st.floats(0.0, 1.0),
    confidence=st.floats(0.5, 0.999),
)
@settings(max_examples=200, deadline=None)
def test_wilson_interval_brackets_the_point_estimate(trials, frac, confidence):
    successes = min(trials, int(frac * trials))
    lo, hi = stats_wilson_ci(successes, trials, confidence)
    assert 0.0 <= lo <= successes / trials <= hi <= 1.0


class TestKolmogorovSmirnov:
    def test_null_distribution_small_statistic(self):
        rng = np.random.default_rng(123)
        samples = rng.random(10**5)
        assert stats_ks(samples, lambda x: min(max(x, 0.0), 1.0)) < 0.006

    def test_constant_samples_vs_continuous_cdf(self):
        assert stats_ks([2.0] * 50, lambda x: -math.expm1(-x)) >= 0.5

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        samples = list(rng.exponential(size=200))
        cdf = lambda x: -math.expm1(-x)
        shuffled = list(samples)
        rng.shuffle(shuffled)
        assert stats_ks(samples, cdf) == stats_ks(shuffled, cdf)

    def test_empty_rejected(self):
        with pytest.raises(ParameterError):
            stats_ks([], lambda x: x)

    def test_matches_scipy_one_sample(self):
        rng = np.random.default_rng(9)
        samples = rng.exponential(size=777)
        mine = stats_ks(samples, lambda x: -math.expm1(-x))
        ref = scipy.stats.kstest(samples, scipy.stats.expon.cdf).statistic
        assert mine == pytest.approx(ref, abs=1e-12)

    def test_matches_scipy_two_sample(self):
        rng = np.random.default_rng(10)
        a = rng.exponential(size=500)
        b = rng.exponential(size=700) * 1.2
        assert stats_ks_two_sample(a, b) == pytest.approx(
            scipy.stats.ks_2samp(a, b).statistic, abs=1e-12
        )


class TestChiSquare:
    def test_pvalue_matches_scipy(self):
        observed = [30, 50, 20, 10, 5]
        probs = [0.3, 0.4, 0.15, 0.1, 0.05]
        res = chi_square_gof(observed, probs, min_expected=0.0)
        expected = np.array(probs) * 115
        ref_stat = float(np.sum((np.array(observed) - expected) ** 2 / expected))
        assert res.statistic == pytest.approx(ref_stat, abs=1e-12)
        assert res.pvalue == pytest.approx(
            float(scipy.stats.chi2.sf(ref_stat, res.dof)), abs=1e-10
        )

    def test_pools_sparse_bins(self):
        observed = [500, 480, 15, 3, 1, 1]
        probs = [0.5, 0.48, 0.012, 0.004, 0.002, 0.002]
        res = chi_square_gof(observed, probs, min_expected=5.0)
        assert res.bins < len(observed)
        assert res.pvalue > 0.001

    def test_detects_wrong_distribution(self):
        observed = [900, 100]
        probs = [0.5, 0.5]
        assert chi_square_gof(observed, probs, min_expected=0.0).pvalue < 1e-10

    def test_degenerate_rejected(self):
        with pytest.raises(ParameterError):
            chi_square_gof([3], [1.0])
        with pytest.raises(ParameterError):
            chi_square_gof([0, 0], [0.5, 0.5])
