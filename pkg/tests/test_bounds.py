import numpy as np
import pytest

from jointlife.bounds import (BoundResult, build_region, build_value_region,
                              compute_bounds, epsilon_for_family, epsilon_max,
                              es_bounds, mean_bounds, mean_bounds_linear,
                              r_curve, sweep, var_bounds)
from jointlife.canonical import CanonicalForm, evaluate
from jointlife.contracts import price_linear_form, widows_pension
from jointlife.copulas import (comonotone, countermonotone, gumbel,
                               independence, survival_transform)
from jointlife.riskmeasures import (DistortionFunction, es_measure, h_eval,
                                    mean_measure, var_measure)
from jointlife import experiments

from oracles import grid_objective_extremes

ALL_MEASURES = [mean_measure(), var_measure(0.99), es_measure(0.975)]


def toy_form(z=(1.0,), u=(0.5,), v=(0.5,), a=None, b=None,
             monotonicity="increasing", statistic="first_death", z0=0.0):
    m = len(z)
    a = (0.0,) * m if a is None else a
    b = (1.0,) * m if b is None else b
    return CanonicalForm(z0, z, u, v, a, b, statistic, monotonicity)


# -- region ------------------------------------------------------------------


def test_zero_radius_pins_reference(paper_family, c_ref):
    form = paper_family["s2da"].form
    for norm in ("l1", "linf"):
        region = build_region(form, c_ref, norm, 0.0)
        r_ref = region.r_ref
        for m in range(0, form.m_bar, 9):
            assert region.coordinate_max(m) == pytest.approx(r_ref[m], abs=1e-9)
            assert region.coordinate_min(m) == pytest.approx(r_ref[m], abs=1e-9)


def test_hand_example_single_point():
    form = toy_form()
    region = build_region(form, independence(), "linf", 0.1)
    res = mean_bounds(region, form)
    assert res.lower == pytest.approx(0.15, abs=1e-9)
    assert res.upper == pytest.approx(0.35, abs=1e-9)


def test_huge_radius_equals_free_region(paper_family, c_ref):
    form = paper_family["f2di"].form
    free_lo = np.maximum(0.0, np.asarray(form.u) + np.asarray(form.v) - 1.0)
    free_hi = np.minimum(form.u, form.v)
    region = build_region(form, c_ref, "linf", 1.5)
    for m in range(0, form.m_bar, 7):
        # B = -1 for this contract: r bounds flip the theta extremes
        r_hi = form.a[m] - free_lo[m]
        r_lo = form.a[m] - free_hi[m]
        assert region.coordinate_max(m) == pytest.approx(r_hi, abs=1e-9)
        assert region.coordinate_min(m) == pytest.approx(r_lo, abs=1e-9)


def test_block_row_accounting(paper_family, c_ref):
    form = paper_family["f2da"].form
    m = form.m_bar
    assert build_region(form, c_ref, "l1", 0.05).block_row_count == 6 * m - 1
    assert build_region(form, c_ref, "linf", 0.05).block_row_count == 6 * m - 2


def test_region_rejects_bad_inputs(paper_family, c_ref):
    form = paper_family["f2da"].form
    with pytest.raises(ValueError):
        build_region(form, c_ref, "l2", 0.1)
    with pytest.raises(ValueError):
        build_region(form, c_ref, "l1", -0.1)


def test_coordinates_stay_in_unit_interval(paper_family, c_ref):
    form = paper_family["s2di"].form
    region = build_region(form, c_ref, "l1", 0.4)
    for m in range(0, form.m_bar, 11):
        assert -1e-9 <= region.coordinate_min(m)
        assert region.coordinate_max(m) <= 1.0 + 1e-9


# -- mean --------------------------------------------------------------------


def test_mean_bounds_collapse_and_saturation(paper_family, c_ref):
    ec = paper_family["s2da"]
    ref_value = evaluate(ec.form, mean_measure(), c_ref)
    region = build_region(ec.form, c_ref, "l1", 0.0)
    res = mean_bounds(region, ec.form)
    assert res.lower == pytest.approx(ref_value, abs=1e-8)
    assert res.upper == pytest.approx(ref_value, abs=1e-8)

    sat = epsilon_max(ec.form, c_ref, "l1").value
    res = mean_bounds(build_region(ec.form, c_ref, "l1", sat), ec.form)
    fh = sorted([evaluate(ec.form, mean_measure(), countermonotone()),
                 evaluate(ec.form, mean_measure(), comonotone())])
    assert res.lower == pytest.approx(fh[0], abs=1e-6)
    assert res.upper == pytest.approx(fh[1], abs=1e-6)


def test_mean_bounds_toy_interval():
    form = toy_form()
    region = build_region(form, independence(), "linf", 0.1)
    res = mean_bounds(region, form)
    assert (res.lower, res.upper) == (pytest.approx(0.15), pytest.approx(0.35))


def test_mean_bounds_linear_widows(marginal_65, marginal_62, c_ref):
    plf = price_linear_form(widows_pension(rate=0.05), marginal_65, marginal_62)
    res = mean_bounds_linear(plf, c_ref, "linf", 0.0)
    ref_price = plf.price(c_ref)
    assert res.lower == pytest.approx(ref_price, abs=1e-8)
    assert res.upper == pytest.approx(ref_price, abs=1e-8)
    # saturation: widow's pension decreases with concordance
    res = mean_bounds_linear(plf, c_ref, "linf", 1.0)
    assert res.lower == pytest.approx(plf.price(comonotone()), abs=1e-6)
    assert res.upper == pytest.approx(plf.price(countermonotone()), abs=1e-6)


def test_mean_bounds_linear_zero_coeffs(c_ref):
    from jointlife.contracts import PriceLinearForm
    plf = PriceLinearForm(4.2, (), (), ())
    res = mean_bounds_linear(plf, c_ref, "l1", 0.3)
    assert res.lower == res.upper == 4.2


# -- VaR ---------------------------------------------------------------------


def test_var_collapse_exact(paper_family, c_ref):
    for name, ec in paper_family.items():
        for norm in ("l1", "linf"):
            region = build_region(ec.form, c_ref, norm, 0.0)
            res = var_bounds(region, ec.form, 0.99)
            ref_value = evaluate(ec.form, var_measure(0.99), c_ref)
            assert res.lower == pytest.approx(ref_value, abs=1e-9), name
            assert res.upper == pytest.approx(ref_value, abs=1e-9), name


def test_var_saturation_fh(paper_family, c_ref):
    ec = paper_family["s2di"]
    sat = epsilon_max(ec.form, c_ref, "linf").value
    region = build_region(ec.form, c_ref, "linf", sat)
    res = var_bounds(region, ec.form, 0.99)
    fh = sorted([evaluate(ec.form, var_measure(0.99), countermonotone()),
                 evaluate(ec.form, var_measure(0.99), comonotone())])
    assert res.lower == pytest.approx(fh[0], abs=1e-6)
    assert res.upper == pytest.approx(fh[1], abs=1e-6)


def test_var_values_are_partial_weight_sums(paper_family, c_ref):
    ec = paper_family["f2da"]
    z0, z = ec.form.z0, np.asarray(ec.form.z)
    partials = {round(float(z0 + z[:k].sum()), 12) for k in range(len(z) + 1)}
    region = build_region(ec.form, c_ref, "l1", 0.07)
    res = var_bounds(region, ec.form, 0.99)
    assert round(res.lower, 12) in partials
    assert round(res.upper, 12) in partials


def test_var_two_point_brute_force():
    # explicit box region, independent reference; compare against direct
    # evaluation of the indicator objective on the enumerated region
    form = toy_form(z=(1.0, 1.0), u=(0.6, 0.4), v=(0.6, 0.4))
    alpha = 0.6
    h = var_measure(alpha)
    for norm in ("l1", "linf"):
        for eps in (0.05, 0.2):
            region = build_region(form, independence(), norm, eps)
            res = var_bounds(region, form, alpha)
            grid_lo, grid_hi = grid_objective_extremes(
                form.u, form.v, region.theta_ref, norm, eps,
                lambda th: form.z0 + h_eval(h, th).sum(axis=1), step=2e-3)
            # bounds are attained within the finite partial-sum set
            assert res.lower == pytest.approx(grid_lo, abs=1e-9)
            assert res.upper == pytest.approx(grid_hi, abs=1e-9)


def test_var_decreasing_direction(paper_family, c_ref):
    ec = paper_family["f2di"]
    region = build_region(ec.form, c_ref, "linf", 0.05)
    res = var_bounds(region, ec.form, 0.99)
    ref_value = evaluate(ec.form, var_measure(0.99), c_ref)
    assert res.lower - 1e-12 <= ref_value <= res.upper + 1e-12


# -- ES ----------------------------------------------------------------------


def test_es_collapse(paper_family, c_ref):
    for name, ec in paper_family.items():
        region = build_region(ec.form, c_ref, "l1", 0.0)
        res = es_bounds(region, ec.form, 0.975)
        ref_value = evaluate(ec.form, es_measure(0.975), c_ref)
        assert res.lower == pytest.approx(ref_value, abs=1e-9), name
        assert res.upper == pytest.approx(ref_value, abs=1e-9), name


def test_es_tiny_alpha_equals_mean(paper_family, c_ref):
    ec = paper_family["s2da"]
    region = build_region(ec.form, c_ref, "linf", 0.01)
    es = es_bounds(region, ec.form, 1e-9)
    mean = mean_bounds(region, ec.form)
    assert es.lower == pytest.approx(mean.lower, abs=1e-6)
    assert es.upper == pytest.approx(mean.upper, abs=1e-6)


@pytest.mark.parametrize("norm", ["l1", "linf"])
@pytest.mark.parametrize("eps", [0.05, 0.2])
def test_es_small_instance_grid_oracle(norm, eps):
    form = toy_form(z=(0.5, 0.8, 0.4), u=(0.7, 0.5, 0.3), v=(0.8, 0.45, 0.35),
                    z0=0.2)
    alpha = 0.55
    region = build_region(form, independence(), norm, eps)
    res = es_bounds(region, form, alpha)
    h = es_measure(alpha)
    grid_lo, grid_hi = grid_objective_extremes(
        form.u, form.v, region.theta_ref, norm, eps,
        lambda th: form.z0 + h_eval(h, th) @ np.asarray(form.z))
    budget = 5e-3 * (form.z0 + sum(form.z))
    # the grid's feasibility slack (1e-6) lets grid optima poke slightly
    # past the true region; 1e-5 covers its amplification by 1/(1-alpha)
    assert res.lower <= grid_lo + 1e-5
    assert res.upper >= grid_hi - 1e-5
    assert res.lower >= grid_lo - budget
    assert res.upper <= grid_hi + budget


def test_es_saturation(paper_family, c_ref):
    ec = paper_family["f2da"]
    sat = epsilon_max(ec.form, c_ref, "l1").value
    region = build_region(ec.form, c_ref, "l1", sat)
    res = es_bounds(region, ec.form, 0.975)
    fh = sorted([evaluate(ec.form, es_measure(0.975), countermonotone()),
                 evaluate(ec.form, es_measure(0.975), comonotone())])
    assert res.lower == pytest.approx(fh[0], abs=1e-6)
    assert res.upper == pytest.approx(fh[1], abs=1e-6)


# -- epsilon scales ------------------------------------------------------------


def test_epsilon_max_single_point():
    form = toy_form()
    em = epsilon_max(form, independence(), "linf")
    assert em.is_exact
    assert em.value == pytest.approx(0.25, abs=1e-9)


def test_epsilon_max_comonotone_reference():
    u = v = (0.7, 0.5, 0.3)
    form = toy_form(z=(1.0, 1.0, 1.0), u=u, v=v)
    em = epsilon_max(form, comonotone(), "linf")
    spans = [min(x, y) - max(0.0, x + y - 1.0) for x, y in zip(u, v)]
    assert em.value == pytest.approx(max(spans), abs=1e-9)


def test_epsilon_max_l1_is_upper_bound(paper_family, c_ref):
    form = paper_family["f2da"].form
    em_inf = epsilon_max(form, c_ref, "linf")
    em_one = epsilon_max(form, c_ref, "l1")
    assert em_inf.is_exact and not em_one.is_exact
    assert em_one.value >= em_inf.value


def test_epsilon_for_family(paper_family, c_ref):
    form = paper_family["f2da"].form
    assert epsilon_for_family([c_ref], c_ref, form, "l1") == 0.0
    family = experiments.delta_grid_family(n=61)
    e1 = epsilon_for_family(family, c_ref, form, "l1")
    einf = epsilon_for_family(family, c_ref, form, "linf")
    assert e1 == pytest.approx(0.05, rel=0.2)
    assert einf == pytest.approx(0.002, rel=0.2)
    # totally ordered family: one of the two extreme members attains the radius
    u, v = np.asarray(form.u), np.asarray(form.v)
    ref_vals = np.asarray(c_ref(u, v))
    end_dists = [float(np.abs(np.asarray(end(u, v)) - ref_vals).sum())
                 for end in (family[0], family[-1])]
    assert e1 == pytest.approx(max(end_dists), abs=1e-12)
    with pytest.raises(ValueError):
        epsilon_for_family([], c_ref, form, "l1")


# -- sweep / r-curve -----------------------------------------------------------


def test_sweep_single_zero_grid(paper_family, c_ref):
    ec = paper_family["f2di"]
    rows = sweep(ec.form, c_ref, "linf", [0.0], ALL_MEASURES)
    assert len(rows) == 3
    for res in rows:
        assert res.lower == pytest.approx(res.upper, abs=1e-8)


def test_sweep_nesting(paper_family, c_ref):
    ec = paper_family["s2di"]
    sat = epsilon_max(ec.form, c_ref, "linf").value
    grid = [0.0, 0.01 * sat, 0.1 * sat, 0.5 * sat, sat]
    rows = sweep(ec.form, c_ref, "linf", grid, ALL_MEASURES)
    by_measure = {}
    for res in rows:
        by_measure.setdefault(res.measure.label, []).append(res)
    for label, series in by_measure.items():
        lowers = [r.lower for r in series]
        uppers = [r.upper for r in series]
        assert all(a >= b - 1e-8 for a, b in zip(lowers, lowers[1:])), label
        assert all(a <= b + 1e-8 for a, b in zip(uppers, uppers[1:])), label


def test_sweep_rejects_unsorted(paper_family, c_ref):
    ec = paper_family["f2da"]
    with pytest.raises(ValueError):
        sweep(ec.form, c_ref, "l1", [0.1, 0.05], ALL_MEASURES)


def test_bracketing_of_candidate_family(paper_family, c_ref):
    # every copula within the ball must have its risk inside the bounds
    ec = paper_family["f2da"]
    family = experiments.delta_grid_family(n=13)
    eps = epsilon_for_family(family, c_ref, ec.form, "l1")
    region = build_region(ec.form, c_ref, "l1", eps)
    for h in ALL_MEASURES:
        res = compute_bounds(region, ec.form, h)
        for cand in family:
            value = evaluate(ec.form, h, cand)
            assert res.lower - 1e-8 <= value <= res.upper + 1e-8, h.label


def test_r_curve_shapes(paper_family, c_ref):
    ec = paper_family["f2da"]
    m_curve = r_curve(ec.form, comonotone())
    assert np.allclose(m_curve, np.minimum(ec.form.u, ec.form.v))
    # increasing payoff: r nonincreasing in m; reference between FH curves
    ref_curve = r_curve(ec.form, c_ref)
    assert np.all(np.diff(ref_curve) <= 1e-12)
    w_curve = r_curve(ec.form, countermonotone())
    assert np.all(ref_curve >= w_curve - 1e-12)
    assert np.all(ref_curve <= m_curve + 1e-12)
    # decreasing payoff: r nondecreasing in m
    dec = paper_family["f2di"]
    assert np.all(np.diff(r_curve(dec.form, c_ref)) >= -1e-12)


def test_bound_result_validation():
    with pytest.raises(ValueError):
        BoundResult(DistortionFunction("mean"), "l1", 0.1, 2.0, 1.0)
