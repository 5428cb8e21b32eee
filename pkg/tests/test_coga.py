import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from gsscm.coga import (
    CogaDistribution,
    coga_cdf,
    coga_pdf,
    coga_quantile,
    setting_scales,
    wh_experiment,
    wh_quantile_estimate,
)
from gsscm.rng import child_rng


def test_chi2_1_pdf():
    d = CogaDistribution([0.5], [2.0])
    assert coga_pdf(d, 1.0) == pytest.approx(np.exp(-0.5) / np.sqrt(2 * np.pi), rel=1e-12)


def test_chi2_2_pdf():
    d = CogaDistribution([0.5, 0.5], [2.0, 2.0])
    assert coga_pdf(d, 2.0) == pytest.approx(np.exp(-1) / 2, rel=1e-12)


def test_chi2_2_cdf_and_quantile():
    d = CogaDistribution.chi2(2)
    assert coga_cdf(d, 2 * np.log(2)) == pytest.approx(0.5, abs=1e-12)
    assert coga_cdf(d, 0.0) == 0.0
    assert coga_quantile(d, 0.5) == pytest.approx(2 * np.log(2), rel=1e-10)


@pytest.mark.parametrize("p", [1, 2, 3, 7, 20])
def test_equal_scales_reduce_to_gamma(p):
    d = CogaDistribution(np.full(p, 0.5), np.full(p, 3.0))
    x = np.linspace(0.01, 40 * p ** 0.5, 60)
    np.testing.assert_allclose(d.pdf(x), stats.gamma.pdf(x, p / 2, scale=3.0), rtol=1e-10, atol=1e-300)
    np.testing.assert_allclose(d.cdf(x), stats.gamma.cdf(x, p / 2, scale=3.0), rtol=1e-10, atol=1e-14)


def test_two_components_vs_numerical_convolution():
    a1, b1, a2, b2 = 1.5, 1.0, 2.5, 3.0
    d = CogaDistribution([a1, a2], [b1, b2])
    f1, f2 = stats.gamma(a1, scale=b1), stats.gamma(a2, scale=b2)
    for x in (0.5, 2.0, 5.0, 12.0):
        ref = integrate.quad(lambda t: f1.pdf(t) * f2.pdf(x - t), 0, x, epsabs=1e-14, epsrel=1e-12)[0]
        assert d.pdf(x) == pytest.approx(ref, rel=1e-8)


def test_weights_sum_to_one():
    d = CogaDistribution([0.5, 0.5, 0.5], [2.0, 4.0, 6.0])
    w = d.weights
    assert np.all(w >= 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-13)


def test_moments():
    d = CogaDistribution([0.5, 1.0], [2.0, 4.0])
    assert d.mean() == pytest.approx(5.0)
    assert d.var() == pytest.approx(0.5 * 4 + 1.0 * 16)


@given(st.lists(st.floats(0.2, 5.0), min_size=1, max_size=5), st.sampled_from([0.1, 0.25, 0.5, 0.75, 0.9]))
def test_round_trip(scales, q):
    d = CogaDistribution(np.full(len(scales), 0.5), scales)
    assert d.cdf(d.quantile(q)) == pytest.approx(q, abs=1e-8)


@given(st.lists(st.floats(0.2, 5.0), min_size=1, max_size=5))
def test_cdf_monotone_bounded(scales):
    d = CogaDistribution(np.full(len(scales), 0.5), scales)
    x = np.linspace(0, d.mean() + 12 * np.sqrt(d.var()), 300)
    F = d.cdf(x)
    assert np.all(np.diff(F) >= -1e-15)
    assert F.min() >= 0 and F.max() <= 1
    assert F[-1] > 0.999


def test_invalid_parameters():
    with pytest.raises(ValueError):
        CogaDistribution([0.5], [0.0])
    with pytest.raises(ValueError):
        CogaDistribution([0.5, 0.5], [1.0])
    with pytest.raises(ValueError):
        CogaDistribution.chi2(2).cdf(-1.0)
    with pytest.raises(ValueError):
        CogaDistribution.chi2(2).quantile(1.0)


def test_cdf_vs_monte_carlo():
    d = CogaDistribution([0.5, 0.5, 0.5], [2.0, 4.0, 6.0])
    s = d.sample(child_rng(3), 10_000_000)
    for x in (1.0, 4.0, 10.0, 25.0):
        assert d.cdf(x) == pytest.approx(np.mean(s <= x), abs=0.003)


def test_quantile_vs_order_statistic():
    d = CogaDistribution([0.5, 0.5], [2.0, 4.0])
    n = 200_000
    s = np.sort(d.sample(child_rng(4), n))
    # distribution-free 99% interval for the 0.75 quantile from binomial order statistics
    lo, hi = stats.binom.ppf([0.005, 0.995], n, 0.75).astype(int)
    assert s[lo - 1] <= d.quantile(0.75) <= s[hi]


def test_wh_constant_samples():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for t in ("square", "fisher", "wilson_hilferty"):
            assert wh_quantile_estimate(np.full(50, 2.5), t, 0.75) == pytest.approx(2.5)
    with pytest.warns(RuntimeWarning):
        wh_quantile_estimate(np.full(5, 1.0), "fisher", 0.75)


def test_wh_matches_q3_cutoff_formula():
    r = np.sqrt(stats.chi2.rvs(4, size=100_000, random_state=1))
    y = r ** (2 / 3)
    med = np.median(y)
    q3 = (med + np.median(np.abs(y - med))) ** 1.5
    assert wh_quantile_estimate(r, "wilson_hilferty", 0.75) == pytest.approx(q3, rel=0.002)


def test_wh_chi2_2_one_million():
    d = CogaDistribution.chi2(2)
    r = np.sqrt(d.sample(child_rng(5), 1_000_000))
    q = wh_quantile_estimate(r, "wilson_hilferty", 0.75)
    assert 0.74 <= d.cdf(q * q) <= 0.76


def test_setting_scales_sum():
    for s in ("constant", "linear", "quadratic"):
        assert setting_scales(7, s).sum() == pytest.approx(14.0)
    with pytest.raises(ValueError):
        setting_scales(3, "cubic")


def _half_normal_population_value(power):
    # population version of the estimate for r = |N(0, 1)|
    from scipy import optimize

    m = stats.norm.ppf(0.75) ** power

    def cdf_h(t):
        return 2 * stats.norm.cdf(max(t, 0.0) ** (1 / power)) - 1

    s = optimize.brentq(lambda v: cdf_h(m + v) - cdf_h(m - v) - 0.5, 1e-12, 10)
    q = m + 1.4826 * s * stats.norm.ppf(0.75)
    return cdf_h(q)


def test_wh_experiment_p1():
    rows = wh_experiment([1], ["constant", "linear", "quadratic"], n_samples=100_000, seed=7)
    assert len(rows) == 9
    for row in rows:
        pop = _half_normal_population_value({"square": 2, "fisher": 1, "wilson_hilferty": 2 / 3}[row["transform"]])
        assert row["f_coga_at_q3sq"] == pytest.approx(pop, abs=0.01)
        if row["transform"] == "wilson_hilferty":
            assert abs(row["f_coga_at_q3sq"] - 0.75) <= 0.02
    # at p = 1 the square and Fisher transforms are biased even in population
    assert _half_normal_population_value(2) < 0.66
    assert _half_normal_population_value(1) < 0.73


def test_wh_experiment_constant_p10():
    rows = wh_experiment([10], "constant", n_samples=100_000)
    err = {r["transform"]: abs(r["f_coga_at_q3sq"] - 0.75) for r in rows}
    assert err["wilson_hilferty"] < min(err["square"], err["fisher"])


def test_wh_experiment_quadratic():
    rows = wh_experiment([5, 10, 20], "quadratic", n_samples=100_000)
    for p in (5, 10, 20):
        err = {r["transform"]: abs(r["f_coga_at_q3sq"] - 0.75) for r in rows if r["p"] == p}
        assert err["wilson_hilferty"] <= min(err["square"], err["fisher"]) + 0.005


def test_wh_ordering_over_seeds():
    # mean absolute error over 20 seeds, per setting and dimension
    for setting in ("constant", "linear", "quadratic"):
        for p in (2, 5, 10):
            err = {"square": [], "fisher": [], "wilson_hilferty": []}
            for seed in range(20):
                for r in wh_experiment([p], setting, n_samples=10_000, seed=seed):
                    err[r["transform"]].append(abs(r["f_coga_at_q3sq"] - 0.75))
            m = {k: np.mean(v) for k, v in err.items()}
            assert m["wilson_hilferty"] < min(m["square"], m["fisher"]), (setting, p, m)


def test_wh_experiment_threads_identical():
    a = wh_experiment([2, 3, 4], ["linear", "constant"], n_samples=5000, seed=9, threads=1)
    b = wh_experiment([2, 3, 4], ["linear", "constant"], n_samples=5000, seed=9, threads=4)
    assert a == b
    assert [r["setting"] for r in a[:9]] == ["linear"] * 9
