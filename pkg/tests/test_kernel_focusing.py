import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from degen_kpp import DomainError
from degen_kpp.kernel_focusing import Kernel, convolve_focused, focusing_order, gaussian_bump

EPS = [0.2, 0.1, 0.05, 0.025]


@pytest.mark.parametrize("J", [Kernel.gaussian(), Kernel.gaussian(0.5), Kernel.uniform(),
                               Kernel.laplace(), Kernel.student_t(6.0)],
                         ids=lambda J: J.name)
def test_kernel_invariants(J):
    out = J.check()
    assert out["mass"] == pytest.approx(1.0, abs=1e-8)
    assert out["second_moment"] == pytest.approx(J.second_moment, rel=1e-6)


def test_student_t_moments():
    assert not Kernel.student_t(3.0).finite_fourth_moment
    assert Kernel.student_t(6.0).fourth_moment == pytest.approx(3 * 36 / (4 * 2))
    with pytest.raises(DomainError):
        Kernel.student_t(2.0)


def test_gaussian_convolution_closed_form():
    # N(0, eps^2) * exp(-x^2) = exp(-x^2/(1+2eps^2))/sqrt(1+2eps^2)
    x = np.linspace(-3, 3, 61)
    f, _ = gaussian_bump()
    for eps in (0.3, 0.05):
        s = 1 + 2 * eps * eps
        exact = np.exp(-x * x / s) / math.sqrt(s) - f(x)
        np.testing.assert_allclose(convolve_focused(Kernel.gaussian(), eps, f, x), exact,
                                   atol=1e-13)


def test_quadratic_is_exact():
    # J_eps * x^2 - x^2 = eps^2 J2
    x = np.linspace(-2, 2, 9)
    J = Kernel.uniform(1.0)
    np.testing.assert_allclose(convolve_focused(J, 0.1, lambda y: y * y, x), 0.01 / 3, atol=1e-14)
    res = focusing_order(J, lambda y: y * y, EPS, d2f=lambda y: 2 + 0 * y)
    assert res.exact and math.isnan(res.slope)


@pytest.mark.parametrize("J,lo,hi", [(Kernel.gaussian(), 1.8, 2.2), (Kernel.uniform(), 1.8, 2.2),
                                     (Kernel.laplace(), 1.7, 2.2),
                                     (Kernel.student_t(6.0), 1.7, 2.2)],
                         ids=["gaussian", "uniform", "laplace", "t6"])
def test_focusing_slopes(J, lo, hi):
    f, d2 = gaussian_bump()
    res = focusing_order(J, f, EPS, d2f=d2)
    assert lo <= res.slope <= hi
    assert np.all(np.diff(res.errors) < 0)


def test_focusing_without_second_derivative():
    f, d2 = gaussian_bump()
    a = focusing_order(Kernel.gaussian(), f, EPS, d2f=d2)
    b = focusing_order(Kernel.gaussian(), f, EPS)
    assert b.slope == pytest.approx(a.slope, abs=1e-3)


def test_sampled_function():
    f, d2 = gaussian_bump()
    xs = np.linspace(-12, 12, 4001)
    x = np.linspace(-2, 2, 41)
    direct = convolve_focused(Kernel.uniform(), 0.1, f, x)
    sampled = convolve_focused(Kernel.uniform(), 0.1, (xs, f(xs)), x)
    np.testing.assert_allclose(sampled, direct, atol=1e-8)
    assert isinstance(CubicSpline(xs, f(xs)), CubicSpline)
    with pytest.raises(DomainError):
        convolve_focused(Kernel.gaussian(), 0.5, (x, f(x)), x)  # samples do not cover the shifts


def test_focusing_validation():
    f, d2 = gaussian_bump()
    with pytest.raises(DomainError):
        focusing_order(Kernel.student_t(3.0), f, EPS)
    with pytest.raises(DomainError):
        focusing_order(Kernel.gaussian(), f, [0.2, 0.1, 0.07, 0.01])
    with pytest.raises(DomainError):
        focusing_order(Kernel.gaussian(), f, [0.2, 0.1, 0.05])
    with pytest.raises(DomainError):
        convolve_focused("gauss", 0.1, f, [0.0])
    with pytest.raises(DomainError):
        convolve_focused(Kernel.gaussian(), -0.1, f, [0.0])
    with pytest.raises(DomainError):
        convolve_focused(Kernel.gaussian(), 0.1, 3.0, [0.0])
