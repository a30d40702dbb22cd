"""Focused nonlocal dispersal versus its diffusion limit (one dimension).

For an even kernel J with unit mass and second moment J2, and
J_eps(z) = J(z/eps)/eps,

    (J_eps * f - f)(x) = eps^2 J2/2 f''(x) + O(eps^4 J4 f'''').
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, stats
from scipy.interpolate import CubicSpline

from ._fd import fornberg_weights
from .exceptions import DomainError, EstimationError
from .ode_core import DEFAULT_TOL
from .validation import check_array_1d, check_real

_GL = leggauss(24)
TRUNCATION_STD = 12.0
_MAX_TRUNCATION_STD = 1e4


@dataclass(frozen=True)
class Kernel:
    """Even probability density on the line.

    ``support`` is the half-width of a compact support, or None;
    ``tail_mass(L)`` returns the mass of |z| > L.
    """

    name: str
    density: object = field(repr=False)
    second_moment: float
    fourth_moment: float
    std: float
    support: float | None = None
    tail_mass: object = field(repr=False, default=None)
    kinks: tuple = ()

    @property
    def finite_fourth_moment(self):
        return math.isfinite(self.fourth_moment)

    @classmethod
    def gaussian(cls, sigma=1.0):
        sigma = check_real(sigma, "sigma", lo=0.0)
        dist = stats.norm(scale=sigma)
        return cls("gaussian", dist.pdf, sigma**2, 3 * sigma**4, sigma, None,
                   lambda L: 2 * dist.sf(L))

    @classmethod
    def uniform(cls, a=1.0):
        a = check_real(a, "a", lo=0.0)

        def pdf(z):
            z = np.asarray(z, dtype=float)
            return np.where(np.abs(z) <= a, 0.5 / a, 0.0)

        return cls("uniform", pdf, a * a / 3, a**4 / 5, a / math.sqrt(3), a,
                   lambda L: max(0.0, 1 - L / a), (-a, a))

    @classmethod
    def laplace(cls, b=1.0):
        b = check_real(b, "b", lo=0.0)
        dist = stats.laplace(scale=b)
        return cls("laplace", dist.pdf, 2 * b * b, 24 * b**4, math.sqrt(2) * b, None,
                   lambda L: math.exp(-L / b), (0.0,))

    @classmethod
    def student_t(cls, nu=3.0):
        nu = check_real(nu, "nu", lo=2.0)
        dist = stats.t(nu)
        j2 = nu / (nu - 2)
        j4 = 3 * nu * nu / ((nu - 2) * (nu - 4)) if nu > 4 else math.inf
        return cls(f"student_t({nu:g})", dist.pdf, j2, j4, math.sqrt(j2), None,
                   lambda L: 2 * dist.sf(L))

    def check(self, tol=DEFAULT_TOL):
        """Mass, symmetry and second moment by adaptive quadrature.

        Returns a dict of the measured values; raises DomainError on failure.
        """
        lim = self.support if self.support is not None else math.inf
        pts = [p for p in self.kinks if -lim < p < lim] or None
        if math.isfinite(lim):
            mass = integrate.quad(self.density, -lim, lim, points=pts, epsabs=tol.quad)[0]
            j2 = integrate.quad(lambda z: z * z * self.density(z), -lim, lim, epsabs=tol.quad)[0]
        else:
            mass = 2 * integrate.quad(self.density, 0, lim, epsabs=tol.quad)[0]
            j2 = 2 * integrate.quad(lambda z: z * z * self.density(z), 0, lim, epsabs=tol.quad)[0]
        z = np.linspace(0.0, 5 * self.std, 50)
        asym = float(np.max(np.abs(self.density(z) - self.density(-z))))
        out = {"mass": mass, "second_moment": j2, "asymmetry": asym}
        if abs(mass - 1) > 100 * tol.quad or abs(j2 - self.second_moment) > 1e3 * tol.quad * max(1, j2) \
                or asym > tol.quad:
            raise DomainError(f"kernel {self.name} fails its invariants: {out}")
        return out


def _as_function(f):
    """Callable from a callable or a pair (x_samples, f_samples)."""
    if callable(f):
        return f, None
    try:
        xs, ys = f
    except (TypeError, ValueError):
        raise DomainError("f must be callable or a pair (x, f(x))") from None
    xs = check_array_1d(xs, "x")
    return CubicSpline(xs, check_array_1d(ys, "f")), (float(xs[0]), float(xs[-1]))


def _truncation(J, scale, tol):
    if J.support is not None:
        return J.support
    L = TRUNCATION_STD * J.std
    while J.tail_mass(L) * scale > tol.quad:
        L *= 2
        if L > _MAX_TRUNCATION_STD * J.std:
            raise DomainError(
                f"kernel {J.name}: tail mass {J.tail_mass(L):.3g} beyond {L:.3g} dominates "
                "the quadrature tolerance")
    return L


def _z_nodes(J, L, panels=16):
    edges = np.unique(np.concatenate([np.linspace(-L, L, 2 * panels + 1),
                                      [k for k in J.kinks if -L <= k <= L]]))
    x, w = _GL
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    z = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wz = (half[:, None] * w[None, :]).ravel()
    return z, wz


def convolve_focused(J, eps, f, x_grid, tol=DEFAULT_TOL):
    """(J_eps * f - f)(x) on ``x_grid`` as int J(z) [f(x - eps z) - f(x)] dz.

    Decaying kernels are truncated at 12 standard deviations, extended
    while the tail mass is above the quadrature tolerance.
    """
    if not isinstance(J, Kernel):
        raise DomainError("J must be a Kernel")
    eps = check_real(eps, "eps", lo=0.0)
    x = check_array_1d(x_grid, "x_grid")
    fun, rng = _as_function(f)
    fx = np.asarray(fun(x), dtype=float)
    scale = max(1.0, float(np.max(np.abs(fx))))
    L = _truncation(J, scale, tol)
    if rng is not None and (x.min() - eps * L < rng[0] or x.max() + eps * L > rng[1]):
        raise DomainError("sampled f does not cover x_grid +/- eps * truncation radius")
    z, wz = _z_nodes(J, L)
    wz = wz * J.density(z)
    shifted = np.asarray(fun(x[:, None] - eps * z[None, :]), dtype=float)
    return (shifted - fx[:, None]) @ wz


@dataclass(frozen=True)
class FocusingResult:
    eps: np.ndarray
    errors: np.ndarray
    slope: float
    exact: bool
    residual_rms: float


def focusing_order(J, f, eps_list, x_grid=None, d2f=None, tol=DEFAULT_TOL):
    """Error sup |(J_eps*f - f)/eps^2 - J2/2 f''| for each eps, and its log-log slope.

    ``d2f`` is f''; without it f'' is taken by 9-point differences.
    The expansion is exact for polynomials of degree <= 3, in which case
    the errors sit at rounding level and ``exact`` is set (slope NaN).
    """
    if not J.finite_fourth_moment:
        raise DomainError(f"kernel {J.name} has an infinite fourth moment; "
                          "the eps^2 remainder is not controlled")
    eps = check_array_1d(eps_list, "eps_list")
    if eps.size < 4:
        raise DomainError("need at least four eps values")
    ratios = eps[1:] / eps[:-1]
    if np.any(eps <= 0) or not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise DomainError("eps_list must be a positive geometric sequence")
    x = check_array_1d(np.linspace(-5, 5, 201) if x_grid is None else x_grid, "x_grid")
    fun, _ = _as_function(f)
    if d2f is None:
        h = 1e-2
        off = h * np.arange(-4, 5)
        w = fornberg_weights(0.0, off, 2)
        d2 = np.asarray(fun(x[:, None] + off[None, :]), dtype=float) @ w
    else:
        d2 = np.asarray(d2f(x), dtype=float)
    target = 0.5 * J.second_moment * d2
    errs = np.array([np.max(np.abs(convolve_focused(J, e, fun, x, tol) / e**2 - target))
                     for e in eps])
    floor = 1e3 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(target)))) / eps.min() ** 2
    if np.all(errs <= max(floor, tol.quad)):
        return FocusingResult(eps, errs, math.nan, True, 0.0)
    coef, res, *_ = np.polyfit(np.log(eps), np.log(errs), 1, full=True)
    rms = float(np.sqrt(res[0] / eps.size)) if res.size else 0.0
    if rms > 0.1:
        raise EstimationError(f"log-log fit residual {rms:.3g} too large for a slope")
    return FocusingResult(eps, errs, float(coef[0]), False, rms)


def gaussian_bump():
    """f = exp(-x^2) with f''."""
    return (lambda x: np.exp(-np.asarray(x) ** 2),
            lambda x: (4 * np.asarray(x) ** 2 - 2) * np.exp(-np.asarray(x) ** 2))

