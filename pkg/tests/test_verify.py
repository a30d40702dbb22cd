import math

import numpy as np
import pytest

from degen_kpp import CertificateError, DomainError, ResolutionError, reconstruct, rhs
from degen_kpp.ode_core import lambda_pm
from degen_kpp.verify import (Bump, CandidateFunction, bell_radius, bootstrap_Kn, bootstrap_Mn,
                              bump_family, check_subsolution, check_supersolution,
                              chebyshev_points, epsilon_recursion, fd_weights_grid,
                              fornberg_weights, kn_root, barrier_certificates, mn_closed_form,
                              mn_first_negative, tw_residual, validity_radius, weak_residual)

C = 2.1
SPEEDS = (2.0, 2.05, 2.1, 2.5, 3.0)


# finite differences


def test_fornberg_exact_on_polynomials():
    x = np.array([-0.3, -0.1, 0.0, 0.15, 0.4])
    p = 1 + 2 * x - 3 * x**2 + 0.5 * x**3 + 0.25 * x**4
    assert p @ fornberg_weights(0.0, x, 0) == pytest.approx(1.0, abs=1e-13)
    assert p @ fornberg_weights(0.0, x, 1) == pytest.approx(2.0, abs=1e-12)
    assert p @ fornberg_weights(0.0, x, 2) == pytest.approx(-6.0, abs=1e-10)


def test_fd_grid_order():
    errs = []
    for n in (50, 100):
        x = np.sort(np.random.default_rng(0).uniform(0, 1, n))
        d1 = fd_weights_grid(x, np.sin(x), 1, 5)
        errs.append(np.max(np.abs(d1 - np.cos(x))))
    assert errs[1] < errs[0] / 8  # fourth order on a refined random grid, up to grid noise
    with pytest.raises(ResolutionError):
        fd_weights_grid(np.arange(3.0), np.arange(3.0), 1, 5)


# barriers


def candidates(c):
    lm, lp = lambda_pm(c)
    out = [CandidateFunction.log_square(c), CandidateFunction.bell_lambda(c, lm),
           CandidateFunction.bell_lambda(c, lp), CandidateFunction.bell_lambda(c, 1.1 * lp),
           CandidateFunction.bell_scaled(c, 0.05)]
    if 2 < c < 3 / math.sqrt(2):
        out.append(CandidateFunction.power_bump(c, 1.0, 0.5 * (max(1 / lm**2 - 1, 0) + 1)))
    return out


@pytest.mark.parametrize("c", SPEEDS)
def test_closed_form_margins_match_definition(c):
    r = np.linspace(0.05, 0.95, 91)
    for g in candidates(c):
        generic = g.derivative(r) - rhs(r, g(r), c)
        scale = np.abs(g.derivative(r)) + np.abs(rhs(r, g(r), c))
        np.testing.assert_array_less(np.abs(g.margin_super(r) - generic), 1e-12 * scale + 1e-15,
                                     err_msg=g.tag)


@pytest.mark.parametrize("c", SPEEDS)
def test_barrier_certificates(c):
    certs = barrier_certificates(c)
    live = [cert for _, cert in certs if cert is not None]
    assert len(live) >= (6 if c == 2.0 else 7)  # the two bells coincide at c = 2
    assert all(cert.passed and cert.status == "strict" for cert in live)
    assert all(cert.relative_margin > 1e-12 for cert in live)
    has_bump = any(name.startswith("power-bump(") for name, _ in certs)
    assert has_bump == (2.0 < c < 3 / math.sqrt(2))


def test_violation_raises():
    lp = lambda_pm(C)[1]
    g = CandidateFunction.bell_lambda(C, 1.1 * lp)
    rr = validity_radius(g)
    with pytest.raises(CertificateError) as exc:
        check_supersolution(g, C, (0.01, 0.99))
    assert exc.value.certificate.argmin > rr


def test_exact_solution_is_not_strict():
    cert = check_supersolution(CandidateFunction.exact_negative(C), C, (0.1, 0.9))
    assert not cert.passed and cert.status == "exact solution"
    assert cert.as_dict()["min_margin"] == 0.0


def test_check_validation():
    g = CandidateFunction.log_square(C)
    with pytest.raises(DomainError):
        check_supersolution(g, 2.5, (0.1, 0.9))
    with pytest.raises(DomainError):
        check_supersolution(g, C, (0.0, 0.9))
    with pytest.raises(DomainError):
        check_supersolution(g, C, (0.1, 0.9), n=1)
    with pytest.raises(DomainError):
        check_subsolution("not a candidate", C, (0.1, 0.9))


@pytest.mark.parametrize("lam_factor", [1.05, 1.1, 1.5, 3.0])
def test_validity_radius_closed_form(lam_factor):
    lam = lam_factor * lambda_pm(C)[1]
    g = CandidateFunction.bell_lambda(C, lam)
    assert validity_radius(g) == pytest.approx(bell_radius(C, lam), rel=1e-12)


def test_tiny_validity_radius():
    # just below lambda-: radius of order (lambda- - lambda)
    lam = lambda_pm(C)[0] * (1 - 1e-9)
    g = CandidateFunction.bell_lambda(C, lam)
    rr = validity_radius(g)
    assert 0 < rr < 1e-8
    assert rr == pytest.approx(bell_radius(C, lam), rel=1e-6)


def test_power_bump_domain():
    with pytest.raises(DomainError):
        CandidateFunction.power_bump(2.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        CandidateFunction.power_bump(C, 1.0, 1.5)


def test_chebyshev_points():
    x = chebyshev_points(0.2, 0.4, 7)
    assert np.all(np.diff(x) > 0) and 0.2 < x[0] and x[-1] < 0.4
    assert x[3] == pytest.approx(0.3)


# recursions


@pytest.mark.parametrize("c,eps", [(1.5, 0.1), (1.9, 0.01), (1.99, 0.001), (1.0, 0.5)])
def test_mn_matches_closed_form(c, eps):
    seq, n = bootstrap_Mn(c, eps)
    a = c * (1 + eps)
    assert n == mn_first_negative(a)
    np.testing.assert_allclose(seq[:-1], mn_closed_form(a, np.arange(n)), rtol=0, atol=1e-10)
    assert seq[-1] <= 0 < seq[-2]


def test_mn_domain():
    with pytest.raises(DomainError):
        bootstrap_Mn(2.0, 0.0)


@pytest.mark.parametrize("c,r0,k0", [(2.5, 0.0, 5.0), (2.1, 0.1, 5.0), (3.0, 0.3, 10.0),
                                     (5.0, 0.5, 100.0)])
def test_kn_limit(c, r0, k0):
    lim = bootstrap_Kn(c, r0, k0)
    root = kn_root(c, r0)
    assert lim == pytest.approx(root, abs=1e-10)
    q = (1 - r0) ** 2
    assert q * root**2 - c * root + 1 == pytest.approx(0.0, abs=1e-12)


def test_kn_double_root_is_slow():
    # c = 2(1 - r0): sublinear convergence, error of order sqrt(tol)
    lim = bootstrap_Kn(2.0, 0.0, 3.0)
    assert abs(lim - kn_root(2.0, 0.0)) < 1e-5


def test_kn_domain():
    with pytest.raises(DomainError):
        bootstrap_Kn(2.5, 0.0, 1.0)


@pytest.mark.parametrize("c,e0", [(2.1, 0.1), (2.5, 0.5), (3.0, 0.9)])
def test_epsilon_recursion(c, e0):
    seq, lim = epsilon_recursion(c, e0)
    assert lim == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(seq) >= -1e-15)
    with pytest.raises(DomainError):
        epsilon_recursion(2.0, e0)


# residuals


def test_tw_residual_small_on_waves(records):
    for name, rec in records.items():
        prof = reconstruct(rec.trace, kind=rec.tag)
        assert tw_residual(prof, C) < 1e-4, name


def test_tw_residual_detects_wrong_speed(small_profile):
    assert tw_residual(small_profile, C) < 1e-8
    assert tw_residual(small_profile, 2.2) > 1e-3


def test_tw_residual_coarse_grid():
    z = np.linspace(-5, 5, 8)
    with pytest.raises(ResolutionError):
        tw_residual((z, 1 / (1 + np.exp(z))), C)


def test_bump():
    b = Bump(1.0, 0.5, 2.0)
    assert b.support == (0.5, 1.5)
    assert b(np.array([1.0]))[0] == pytest.approx(2 * math.exp(-1))
    assert b(np.array([0.5, 1.6]))[0] == 0.0
    z = np.linspace(0.6, 1.4, 9)
    h = 1e-6
    np.testing.assert_allclose(b.derivative(z), (b(z + h) - b(z - h)) / (2 * h), atol=1e-7)


def test_weak_residual_on_waves(records):
    for name, rec in records.items():
        prof = reconstruct(rec.trace, kind=rec.tag)
        bumps = bump_family(prof, 5)
        assert len(bumps) == 5
        assert max(weak_residual(prof, C, b) for b in bumps) < 1e-3, name


def test_weak_residual_boundary_term(large_profile):
    # a bump centred at z* needs the c psi(z*) term; without it the residual is O(1)
    b = Bump(large_profile.z_star, 1.0)
    res = weak_residual(large_profile, C, b)
    assert res < 1e-6
    assert C * b(np.array([large_profile.z_star]))[0] > 0.1


def test_weak_residual_detects_wrong_speed(small_profile):
    b = bump_family(small_profile, 5)[2]
    assert weak_residual(small_profile, C, b) < 1e-8
    assert weak_residual(small_profile, 2.3, b) > 1e-3


def test_weak_residual_zero_amplitude(small_profile):
    assert weak_residual(small_profile, C, Bump(0.0, 1.0, 0.0)) == 0.0
