import numpy as np
import pytest
from scipy import stats

from jointlife.canonical import evaluate
from jointlife.contracts import joint_life_annuity
from jointlife.copulas import (comonotone, countermonotone, gumbel,
                               gumbel_summaries, independence,
                               survival_transform, tau_band_bounds)
from jointlife.marginals import GompertzMarginal
from jointlife.montecarlo import (SimulationConfig, curtate_lifetimes,
                                  empirical_measures, sample_copula,
                                  simulate_payoffs)
from jointlife.riskmeasures import mean_measure


def test_independence_empirical_copula():
    uv = sample_copula(independence(), 100_000, seed=1)
    hit = np.mean((uv[:, 0] <= 0.5) & (uv[:, 1] <= 0.5))
    assert hit == pytest.approx(0.25, abs=0.005)


def test_frechet_extremes_exact():
    uv = sample_copula(comonotone(), 1000, seed=2)
    assert np.array_equal(uv[:, 0], uv[:, 1])
    uv = sample_copula(countermonotone(), 1000, seed=3)
    assert np.allclose(uv[:, 0] + uv[:, 1], 1.0)


def test_gumbel_sampler_tau():
    uv = sample_copula(gumbel(1.96), 1_000_000, seed=4)
    tau = stats.kendalltau(uv[:200_000, 0], uv[:200_000, 1]).statistic
    closed = gumbel_summaries(1.96)["tau"]
    assert tau == pytest.approx(closed, abs=0.004)


def test_survival_transform_sampling():
    uv = sample_copula(survival_transform(gumbel(1.96)), 200_000, seed=5)
    tau = stats.kendalltau(uv[:, 0], uv[:, 1]).statistic
    assert tau == pytest.approx(gumbel_summaries(1.96)["tau"], abs=0.005)
    # survival flip preserves uniform margins
    assert stats.kstest(uv[:, 0], "uniform").pvalue > 1e-4


def test_quasi_copulas_not_samplable():
    lo, _ = tau_band_bounds(0.49)
    with pytest.raises(ValueError, match="not a distribution"):
        sample_copula(lo, 10, seed=0)


def test_determinism():
    a = sample_copula(gumbel(1.7), 5000, seed=11)
    b = sample_copula(gumbel(1.7), 5000, seed=11)
    assert np.array_equal(a, b)
    c = sample_copula(gumbel(1.7), 5000, seed=12)
    assert not np.array_equal(a, c)


def test_comonotone_same_marginals_ties():
    marg = GompertzMarginal(65.0, 85.47, 10.45, 50.0)
    uv = sample_copula(comonotone(), 2000, seed=6)
    kx, ky = curtate_lifetimes(marg, marg, uv)
    assert np.array_equal(kx, ky)


def test_simulated_law_matches_formula(c_ref, paper_family):
    ec = paper_family["f2da"]
    n = 400_000
    uv = sample_copula(c_ref, n, seed=7)
    kx, ky = curtate_lifetimes(ec.fbar, ec.gbar, uv)
    kmin = np.minimum(kx, ky)
    for k in (5, 20, 40):
        p = float(c_ref(ec.fbar.survival(float(k)), ec.gbar.survival(float(k))))
        phat = np.mean(kmin >= k)
        band = 4.0 * np.sqrt(p * (1.0 - p) / n)
        assert abs(phat - p) < band, k


def test_payoff_mean_matches_analytic(c_ref, paper_family):
    ec = paper_family["f2da"]
    n = 1_000_000
    uv = sample_copula(c_ref, n, seed=8)
    payoffs = simulate_payoffs(ec.contract, ec.fbar, ec.gbar, uv)
    assert np.all(payoffs >= 0.0)
    analytic = evaluate(ec.form, mean_measure(), c_ref)
    se = payoffs.std() / np.sqrt(n)
    assert abs(payoffs.mean() - analytic) < 4.0 * se


def test_empirical_measures_constant():
    est = empirical_measures(np.full(500, 3.3), 0.99, 0.975, seed=9)
    assert est.mean == est.var == est.es == pytest.approx(3.3)
    assert est.se_mean == est.se_var == est.se_es == 0.0


def test_bootstrap_se_scaling(c_ref, paper_family):
    ec = paper_family["s2da"]
    uv = sample_copula(c_ref, 40_000, seed=10)
    payoffs = simulate_payoffs(ec.contract, ec.fbar, ec.gbar, uv)
    small = empirical_measures(payoffs[:10_000], 0.99, 0.975, seed=1)
    large = empirical_measures(payoffs[:40_000], 0.99, 0.975, seed=1)
    ratio = small.se_mean / large.se_mean
    assert 2.0 * 0.7 < ratio < 2.0 * 1.3  # sqrt(4) within 30%


def test_empirical_measures_determinism(c_ref, paper_family):
    ec = paper_family["f2di"]
    uv = sample_copula(c_ref, 20_000, seed=13)
    payoffs = simulate_payoffs(ec.contract, ec.fbar, ec.gbar, uv)
    a = empirical_measures(payoffs, 0.99, 0.975, seed=2)
    b = empirical_measures(payoffs, 0.99, 0.975, seed=2)
    assert a == b


def test_simulation_config_validation(c_ref, paper_family):
    ec = paper_family["f2da"]
    with pytest.raises(ValueError):
        SimulationConfig(0, 1, c_ref, ec.contract, ec.fbar, ec.gbar)
