import numpy as np
import pytest

from degen_kpp import (DomainError, WaveKind, alpha_switch, classify,
                       decay_exponent, shoot, small_speed_scan, solve_large_iteration,
                       threshold_table)
from degen_kpp.ode_core import Speed
from degen_kpp.shooting import GAP_SPEED_LIMIT

C = 2.1
H0_HALF = 0.01402343436109147  # regression values at c = 2.1
ALPHA_MAX = 1.371881023185166


def test_small_solution_regression(small_trace):
    assert small_trace.alpha == pytest.approx(H0_HALF, rel=1e-9)


def test_small_solution_separates_crossing_traces(small_trace):
    a = small_trace.alpha
    assert shoot(C, a * (1 - 1e-6)).crosses_zero
    assert not shoot(C, a * (1 + 1e-6)).crosses_zero


def test_small_solution_tends_to_zero_at_one(small_trace):
    # h0 -> 0 as r -> 1 (non-saturated): sqrt(h)/(1-r) stays bounded
    m = small_trace.s < 1e-6
    q = np.sqrt(small_trace.h[m]) / small_trace.s[m]
    assert np.all(np.isfinite(q)) and q.max() < 1.0


def test_threshold_table_chain(table):
    assert table.chain_failures() == []
    assert table.h0_half == pytest.approx(H0_HALF, rel=1e-9)
    assert table.alpha_max == pytest.approx(ALPHA_MAX, rel=1e-9)
    assert table.H_half == pytest.approx(table.alpha_max, rel=1e-9)
    lo_m, hi_m = table.certificates["alpha_switch_minus"]
    lo_p, _ = table.certificates["alpha_switch_plus"]
    assert hi_m < lo_p
    d = table.as_dict()
    assert d["c"] == C and set(d["certificates"]) == {"alpha_max", "alpha_switch_minus",
                                                       "alpha_switch_plus"}


def test_large_solution_tracks_alpha_max(large_trace, table):
    assert large_trace.alpha == pytest.approx(table.alpha_max, rel=1e-9)


def test_gap_closes_above_limit():
    # for c above 3 sqrt(2)/2 both switch values coincide with alpha_max
    c = 2.2
    assert c > GAP_SPEED_LIMIT
    tm, tp = alpha_switch(c)
    assert tm.value == pytest.approx(tp.value, rel=1e-8)


@pytest.mark.parametrize("name", ["NonSaturated", "SaturatedA", "SaturatedB", "SaturatedC"])
def test_classify_types(records, name):
    rec = records[name]
    assert str(rec.tag) == name
    assert rec.tag.is_wave and rec.trace is not None
    assert rec.tag.saturated == (name != "NonSaturated")


def test_classify_outside_waves(table):
    below = classify(C, 0.5 * table.h0_half, table)
    assert below.tag is WaveKind.BELOW_SMALL and not below.tag.is_wave
    above = classify(C, 1.01 * table.alpha_max, table)
    assert above.tag is WaveKind.ABOVE_MAX and above.trace is None
    beyond = classify(C, 3.0, table)
    assert beyond.tag is WaveKind.ABOVE_MAX and beyond.notes


def test_classify_validation(table):
    with pytest.raises(DomainError):
        classify(1.9, 0.1)
    with pytest.raises(DomainError):
        classify(2.2, 0.1, table)
    with pytest.raises(DomainError):
        classify(C, -0.1, table)


def test_decay_exponents(records, large_trace):
    spd = Speed.from_c(C)
    ns = records["NonSaturated"]
    assert ns.tail_exponent_estimate == pytest.approx(spd.lambda_minus, rel=1e-2)
    fit = decay_exponent(large_trace)
    assert fit.nearest == "lambda_plus"
    assert fit.mu == pytest.approx(spd.lambda_plus, rel=1e-2)
    sat = decay_exponent(records["SaturatedC"].trace)
    assert sat.nearest == "lambda_minus"


def test_monotone_iteration():
    tr, diag = solve_large_iteration(C)
    assert diag.weighted_decreasing
    floor = 64 * np.finfo(float).eps * np.max(np.abs(tr.h))
    assert diag.min_increment >= -floor
    assert diag.bound_excess <= floor
    assert diag.h_half == pytest.approx(ALPHA_MAX, abs=1e-8)
    # plain sup norm is not monotone; the weighted one is
    assert len(diag.sup_diffs) == diag.n_iter


def test_small_speed_scan():
    rep = small_speed_scan(1.5, np.geomspace(1e-6, 1, 8))
    assert rep.certified and not rep.anomalies
    assert all(outcome == "h(0)>0" for _, outcome, _ in rep.entries)
    with pytest.raises(DomainError):
        small_speed_scan(2.0, [0.1])
    with pytest.raises(DomainError):
        small_speed_scan(1.5, [-0.1])


def test_threshold_table_cached():
    assert threshold_table(C) is not None
    assert threshold_table(C).as_dict() == threshold_table(C).as_dict()


def test_bell_top_tangency(records, table):
    rec = records["SaturatedB"]
    assert rec.inflection_radii == (0.5,)
    assert rec.alpha == table.bell_top

