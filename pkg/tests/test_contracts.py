import numpy as np
import pytest

from jointlife.contracts import (Contract, calibrate_levels,
                                 joint_life_annuity, joint_life_insurance,
                                 last_survivor_annuity,
                                 last_survivor_insurance, payoff_spec,
                                 price_linear_form, reversionary_annuity,
                                 widows_pension)
from jointlife.copulas import comonotone, countermonotone, independence
from jointlife import experiments

from oracles import brute_price

V = 1.0 / 1.05


def all_kinds(level=1.0, term=None):
    return [joint_life_annuity(level, 0.05, term),
            last_survivor_annuity(level, 0.05, term),
            joint_life_insurance(level, 0.05, term),
            last_survivor_insurance(level, 0.05, term),
            reversionary_annuity(level, 0.05, term),
            widows_pension(level, 0.05, term)]


def test_whole_life_annuity_payoff(marginal_65, marginal_62):
    spec = payoff_spec(joint_life_annuity(rate=0.05), marginal_65, marginal_62)
    assert spec.statistic == "first_death"
    assert spec.monotonicity == "increasing"
    ks = np.arange(0, 10)
    expected = np.array([sum(V ** j for j in range(1, k + 1)) for k in ks])
    assert np.allclose(spec.payoff_at(ks), expected, atol=1e-12)


def test_whole_life_insurance_payoff(marginal_65, marginal_62):
    spec = payoff_spec(joint_life_insurance(level=2.0, rate=0.05),
                       marginal_65, marginal_62)
    assert spec.statistic == "first_death"
    assert spec.monotonicity == "decreasing"
    assert spec.payoff_at(0) == pytest.approx(2.0 * V)
    assert spec.payoff_at(7) == pytest.approx(2.0 * V ** 8)


def test_term_insurance_increasing_classification(marginal_65, marginal_62):
    # flat benefit, finite term: payoff rises with the death year and then
    # freezes at the term, so the sequence is (weakly) increasing in reverse
    # discounting order only when the schedule grows; build one explicitly
    growing = Contract("joint_life_insurance", level=1.0, rate=0.05, term=10,
                       schedule=tuple(1.1 ** k for k in range(1, 11)))
    spec = payoff_spec(growing, marginal_65, marginal_62)
    assert spec.monotonicity == "increasing"


def test_payoff_spec_rejects_two_life_payoffs(marginal_65, marginal_62):
    for contract in (reversionary_annuity(), widows_pension()):
        with pytest.raises(ValueError, match="single-statistic"):
            payoff_spec(contract, marginal_65, marginal_62)


def test_linear_form_coefficients_annuity(marginal_65, marginal_62):
    plf = price_linear_form(joint_life_annuity(level=2.0, rate=0.05, term=5),
                            marginal_65, marginal_62)
    assert plf.c0 == 0.0
    assert np.allclose(plf.coeffs, [2.0 * V ** k for k in range(1, 6)])
    ks = np.arange(1.0, 6.0)
    assert np.allclose(plf.u, marginal_65.survival(ks))
    assert np.allclose(plf.v, marginal_62.survival(ks))


def test_linear_form_coefficients_reversionary(marginal_65, marginal_62):
    n = 5
    plf = price_linear_form(reversionary_annuity(rate=0.05, term=n),
                            marginal_65, marginal_62)
    ks = np.arange(1.0, n + 1.0)
    w = V ** ks
    fb, gb = marginal_65.survival(ks), marginal_62.survival(ks)
    assert plf.c0 == pytest.approx(float(np.dot(w, fb + gb)))
    assert np.allclose(plf.coeffs, -2.0 * w)


@pytest.mark.parametrize("term", [None, 12], ids=["whole_life", "term12"])
def test_linear_form_equals_brute_force(term, marginal_65, marginal_62, c_ref):
    copulas = [independence(), countermonotone(), comonotone(), c_ref]
    for contract in all_kinds(level=1.7, term=term):
        plf = price_linear_form(contract, marginal_65, marginal_62)
        for cop in copulas:
            expected = brute_price(contract, marginal_65, marginal_62, cop)
            assert plf.price(cop) == pytest.approx(expected, abs=1e-10, rel=1e-10)


def test_concordance_monotonicity(marginal_65, marginal_62):
    # directions per the payoff statistic and slope: first-death payoffs
    # move with concordance, last-death payoffs against it
    w, pi, m = countermonotone(), independence(), comonotone()
    directions = {
        "joint_life_annuity": +1, "last_survivor_annuity": -1,
        "joint_life_insurance": -1, "last_survivor_insurance": +1,
        "reversionary_annuity": -1, "widows_pension": -1,
    }
    for contract in all_kinds():
        plf = price_linear_form(contract, marginal_65, marginal_62)
        seq = [plf.price(w), plf.price(pi), plf.price(m)]
        if directions[contract.kind] < 0:
            seq = seq[::-1]
        assert seq[0] <= seq[1] + 1e-12 <= seq[2] + 2e-12, contract.kind


def test_last_survivor_decomposition(marginal_65, marginal_62, c_ref):
    from jointlife.canonical import direct_risk_oracle
    from jointlife.riskmeasures import mean_measure
    contract = last_survivor_insurance(level=3.0, rate=0.05)
    plf = price_linear_form(contract, marginal_65, marginal_62)
    spec = payoff_spec(contract, marginal_65, marginal_62)
    for cop in (independence(), countermonotone(), comonotone(), c_ref):
        direct = direct_risk_oracle(spec, marginal_65, marginal_62, cop,
                                    mean_measure())
        assert plf.price(cop) == pytest.approx(direct, abs=1e-10)


def test_calibration_mechanics():
    family = experiments.paper_contracts({n: 1.0 for n in experiments.CONTRACT_NAMES})
    entries = [(family[n].contract, family[n].fbar, family[n].gbar)
               for n in experiments.CONTRACT_NAMES]
    levels = calibrate_levels(entries, anchor_index=0)
    assert levels[0] == 1.0
    pi = independence()
    anchor_price = price_linear_form(entries[0][0], entries[0][1],
                                     entries[0][2]).price(pi)
    for (contract, fb, gb), level in zip(entries, levels):
        price = price_linear_form(contract.with_level(level), fb, gb).price(pi)
        assert price == pytest.approx(anchor_price, rel=1e-12)
    # second-to-die annuity level matches the published one
    assert levels[1] == pytest.approx(1.169, abs=0.005)


def test_calibration_rejects_zero_price(marginal_65, marginal_62):
    from jointlife.marginals import GompertzMarginal
    anchor = (joint_life_annuity(rate=0.05), marginal_65, marginal_62)
    # both lives certainly dead before the first payment date
    dead = GompertzMarginal(114.5, 85.47, 10.45, 0.5)
    degenerate = (joint_life_annuity(rate=0.05, term=3), dead, dead)
    with pytest.raises(ValueError, match="zero price"):
        calibrate_levels([anchor, degenerate], anchor_index=0)


def test_contract_validation():
    with pytest.raises(ValueError):
        Contract("funeral_plan")
    with pytest.raises(ValueError):
        Contract("joint_life_annuity", level=-1.0)
    with pytest.raises(ValueError):
        Contract("joint_life_annuity", term=0)
    with pytest.raises(ValueError):
        Contract("joint_life_annuity", rate=-0.05)
