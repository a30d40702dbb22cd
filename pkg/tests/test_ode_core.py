import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from degen_kpp import DEFAULT_TOL, DomainError, Speed, ToleranceSet, integrate, lambda_pm, rhs, shoot, zero_fate
from degen_kpp.ode_core import TOWARD_ONE, TOWARD_ZERO, bell, lambda_bell, log_square_bound

C = 2.1


def reference(c, r0, h0, r1):
    """Plain RK on h' = 2c sqrt(h+)/(1-r) - 2r, valid away from h = 0 and r = 0, 1."""
    sol = solve_ivp(lambda r, h: 2 * c * np.sqrt(np.maximum(h, 0)) / (1 - r) - 2 * r,
                    (r0, r1), [h0], method="DOP853", rtol=1e-13, atol=1e-15)
    return float(sol.y[0, -1])


# constants


def test_lambda_pm_roots():
    lm, lp = lambda_pm(C)
    assert lm == pytest.approx(0.7298437881283576, rel=1e-15)
    assert lp == pytest.approx(1.3701562118716424, rel=1e-15)
    assert lm * lp == pytest.approx(1.0, rel=1e-15)
    assert lm + lp == pytest.approx(C, rel=1e-15)


def test_lambda_pm_double_root_and_large_c():
    assert lambda_pm(2.0) == (1.0, 1.0)
    lm, lp = lambda_pm(1e8)
    assert lm == pytest.approx(1e-8, rel=1e-12)  # no cancellation


def test_lambda_pm_rejects_small_speed():
    with pytest.raises(DomainError):
        lambda_pm(1.9)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_speed_validation(bad):
    with pytest.raises(DomainError):
        Speed.from_c(bad)


def test_speed_constants():
    spd = Speed.from_c(C)
    assert spd.bell_top == pytest.approx(1 / (16 * C * C), rel=1e-15)
    assert spd.plus_bell_top == pytest.approx(0.117339, abs=1e-5)
    assert spd.zero_exponent == pytest.approx(1 / spd.lambda_minus**2 - 1)
    assert not Speed.from_c(1.5).has_waves
    assert math.isnan(Speed.from_c(1.5).lambda_minus)


def test_rhs_bell_is_nullcline():
    r = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(rhs(r, bell(C, r), C), 0.0, atol=1e-15)
    assert rhs(0.5, -1.0, C) == -1.0  # h+ = 0 below zero


def test_rhs_domain():
    with pytest.raises(DomainError):
        rhs(1.0, 0.1, C)
    with pytest.raises(DomainError):
        rhs(0.0, 0.1, C)


def test_envelopes():
    r = np.array([0.25, 0.5])
    np.testing.assert_allclose(lambda_bell(2.0, r), (2 * r * (1 - r)) ** 2)
    np.testing.assert_allclose(log_square_bound(C, r), (C * np.log1p(-r)) ** 2)
    # s argument carries 1 - r exactly
    assert log_square_bound(C, 1.0, s=1e-300) == pytest.approx((C * math.log(1e-300)) ** 2)


# tolerances


def test_tolerance_defaults_and_refined():
    tol = ToleranceSet()
    assert tol == DEFAULT_TOL
    fine = tol.refined(0.1)
    assert fine.ode_rel == pytest.approx(1e-13) and fine.bisect == tol.bisect
    assert tol.as_dict()["fit_window"] == [1e-6, 1e-3]


@pytest.mark.parametrize("kw", [{"ode_rel": 0.0}, {"bisect": 1e-16}, {"delta": 0.1},
                                {"fit_window": (1e-3, 1e-6)}, {"fit_window": 3},
                                {"sigma_deep": 800.0}, {"t_deep": 0.0}])
def test_tolerance_validation(kw):
    with pytest.raises(DomainError):
        ToleranceSet(**kw)


# integration


def test_forward_matches_reference():
    tr = integrate(C, (0.5, 0.5), TOWARD_ONE)
    for r1 in (0.7, 0.9):
        assert tr.evaluate(r1) == pytest.approx(reference(C, 0.5, 0.5, r1), rel=1e-10)


def test_backward_matches_reference():
    tr = integrate(C, (0.5, 0.5), TOWARD_ZERO)
    assert tr.evaluate(0.2) == pytest.approx(reference(C, 0.5, 0.5, 0.2), rel=1e-10)


def test_integrate_rejects_bad_start():
    with pytest.raises(DomainError):
        integrate(C, (0.5, -0.3))  # below -r^2
    with pytest.raises(DomainError):
        integrate(C, (1.0, 0.1))
    with pytest.raises(DomainError):
        integrate(C, (0.5, 0.1), direction="sideways")


def test_negative_start_is_exact_parabola():
    tr = integrate(C, (0.5, -0.1), TOWARD_ONE)
    K = -0.1 + 0.25
    np.testing.assert_allclose(tr.h, K - tr.r**2, atol=1e-15)
    assert tr.neg_K == pytest.approx(K)


def test_downhill_crossing_continues_as_parabola(table):
    tr = shoot(C, 0.5 * table.h0_half)
    assert tr.crosses_zero
    rc = tr.r_cross
    assert 0.5 < rc < 1
    r = np.array([rc + 0.5 * (1 - rc)])
    np.testing.assert_allclose(tr.evaluate(r), rc * rc - r * r, atol=1e-14)


def test_exact_negative_solution():
    for c in (0.5, 2.0, 5.0):
        tr = shoot(c, -0.25)
        np.testing.assert_array_equal(tr.h, -tr.r**2)
        assert tr.alpha is None


def test_trace_invariants(type_alphas):
    tr = shoot(C, type_alphas["SaturatedA"])
    assert np.all(np.diff(tr.r) > 0)
    np.testing.assert_allclose(tr.s, 1 - tr.r, atol=1e-16)
    assert tr.check_envelope() <= 1e-12
    assert tr.positive
    radii = tr.critical_radii()
    assert len(radii) == 2 and radii[0] < 0.5 < radii[1]
    assert tr.evaluate(0.5) == pytest.approx(type_alphas["SaturatedA"], rel=1e-14)
    assert set(tr.to_columns()) == {"r", "h"}


def test_trace_reaches_deep_charts(large_trace):
    assert large_trace.sigma_max >= DEFAULT_TOL.sigma_deep - 1e-9
    assert large_trace.t_min <= math.log(DEFAULT_TOL.delta)


# fate at r = 0


def test_zero_fate_certificates(table):
    assert zero_fate(C, 0.5, 0.01).kind == "zero"
    assert zero_fate(C, 0.5, 2.0).kind == "positive"
    below = zero_fate(C, 0.5, table.alpha_max * (1 - 1e-6))
    above = zero_fate(C, 0.5, table.alpha_max * (1 + 1e-6))
    assert below.kind == "zero" and above.kind == "positive"
    assert above.h0_estimate > 0 and below.h0_estimate == 0.0


def test_zero_fate_touches(table):
    # between the switch values: meets the lambda+ bell only
    a = 0.5 * (table.alpha_switch_minus + table.alpha_switch_plus)
    f = zero_fate(C, 0.5, a, want_touch=True)
    assert f.touches_plus and not f.touches_minus


def test_zero_fate_small_speed_positive():
    assert zero_fate(1.5, 0.5, 1e-4).kind == "positive"
