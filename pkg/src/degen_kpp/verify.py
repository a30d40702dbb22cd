"""Floating-point certificates for barriers, recursions and residuals.

Barriers are checked pointwise at Chebyshev samples (not interval
arithmetic).  A supersolution satisfies g' > F(r, g) and a subsolution
g' < F(r, g), with F(r, h) = 2c sqrt(h+)/(1-r) - 2r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .exceptions import (
    CertificateError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    ResolutionError,
)
from ._fd import fd_weights_grid, fornberg_weights  # noqa: F401
from .ode_core import lambda_pm, rhs
from .validation import check_interval, check_real, check_speed
from .wave import _side_function

MARGIN = 1e-12

# ---------------------------------------------------------------------------
# candidate barriers


@dataclass(frozen=True)
class CandidateFunction:
    """A closed-form barrier with its value, derivative and margin rules.

    ``margin_super(r, c)`` is g' - F(r, g), written without cancellation
    where the closed form allows it.  ``side`` tells where the barrier
    holds: "all" on (0,1), "prefix" on (0, r*), "suffix" on (r*, 1).
    """

    tag: str
    params: dict
    c: float
    value: object = field(repr=False, compare=False)
    derivative: object = field(repr=False, compare=False)
    margin: object = field(repr=False, compare=False, default=None)
    kind: str = "super"
    side: str = "all"

    def __call__(self, r):
        return self.value(np.asarray(r, dtype=float))

    def margin_super(self, r):
        r = np.asarray(r, dtype=float)
        if self.margin is not None:
            return self.margin(r)
        return self.derivative(r) - rhs(r, self.value(r), self.c)

    @classmethod
    def log_square(cls, c):
        """c^2 log(1-r)^2, a supersolution on (0,1); g' - F = 2r exactly."""
        c = check_speed(c)

        def value(r):
            return (c * np.log1p(-r)) ** 2

        def deriv(r):
            return -2 * c * c * np.log1p(-r) / (1 - r)

        return cls("log-square", {}, c, value, deriv, lambda r: 2 * r, "super", "all")

    @classmethod
    def bell_lambda(cls, c, lam):
        """lam^2 r^2 (1-r)^2.

        g' - F = 2r[(lam - lam_-)(lam - lam_+) - lam^2 r (3 - 2r)], so it is
        a subsolution for lam in [lam_-, lam_+] (c >= 2) and a supersolution
        on a prefix interval otherwise.
        """
        c = check_speed(c)
        lam = check_real(lam, "lambda", lo=0.0)
        p = lam * lam - c * lam + 1.0
        if c >= 2.0:
            lm, lp = lambda_pm(c)
            inside = lm <= lam <= lp
            if inside:
                # product of (lam - lam_-)(lam - lam_+) without cancellation
                p = (lam - lm) * (lam - lp)
        else:
            inside = False
        kind, side = ("sub", "all") if inside else ("super", "prefix")

        def value(r):
            return (lam * r * (1 - r)) ** 2

        def deriv(r):
            return 2 * lam * lam * r * (1 - r) * (1 - 2 * r)

        def margin(r):
            return 2 * r * (p - lam * lam * r * (3 - 2 * r))

        return cls("bell-lambda", {"lambda": lam}, c, value, deriv, margin, kind, side)

    @classmethod
    def bell_scaled(cls, c, eps):
        """r^2 (1-r)^2/(c+eps)^2, a supersolution near r = 1.

        g' - F = 2r lam [lam (1-r)(1-2r) + eps] with lam = 1/(c+eps).
        """
        c = check_speed(c)
        eps = check_real(eps, "eps", lo=0.0)
        lam = 1.0 / (c + eps)

        def value(r):
            return (lam * r * (1 - r)) ** 2

        def deriv(r):
            return 2 * lam * lam * r * (1 - r) * (1 - 2 * r)

        def margin(r):
            return 2 * r * lam * (lam * (1 - r) * (1 - 2 * r) + eps)

        return cls("bell-scaled", {"eps": eps}, c, value, deriv, margin, "super", "suffix")

    @classmethod
    def power_bump(cls, c, alpha, beta):
        """lam_-^2 r^2 (1 + alpha r^beta), a supersolution near r = 0.

        Requires beta in (1/lam_-^2 - 1, 1), a nonempty range iff
        2 < c < 3/sqrt(2).  With S = sqrt(1 + alpha r^beta),
        g' - F = alpha r^(1+beta) [lam^2 (2+beta) - 2c lam/((1+S)(1-r))]
                 - 2c lam r^2/(1-r).
        """
        c = check_speed(c)
        alpha = check_real(alpha, "alpha", lo=0.0)
        if c <= 2.0:
            raise DomainError(f"power bump needs c > 2, got {c}")
        lam = lambda_pm(c)[0]
        b_lo = 1.0 / lam**2 - 1.0
        beta = check_real(beta, "beta", lo=b_lo, hi=1.0)

        def value(r):
            return lam * lam * r * r * (1 + alpha * r**beta)

        def deriv(r):
            return lam * lam * (2 * r + alpha * (2 + beta) * r ** (1 + beta))

        def margin(r):
            S = np.sqrt(1 + alpha * r**beta)
            return (alpha * r ** (1 + beta) * (lam * lam * (2 + beta) - 2 * c * lam / ((1 + S) * (1 - r)))
                    - 2 * c * lam * r * r / (1 - r))

        return cls("power-bump", {"alpha": alpha, "beta": beta}, c, value, deriv, margin,
                   "super", "prefix")

    @classmethod
    def exact_negative(cls, c):
        """-r^2, an exact solution (margin identically zero)."""
        c = check_speed(c)
        return cls("exact-negative", {}, c, lambda r: -r * r, lambda r: -2 * r,
                   lambda r: 0.0 * r, "exact", "all")


@dataclass(frozen=True)
class Certificate:
    """Result of a barrier check at ``n`` Chebyshev samples."""

    kind: str
    tag: str
    c: float
    interval: tuple
    n: int
    passed: bool
    status: str
    min_margin: float
    argmin: float
    relative_margin: float

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def chebyshev_points(a, b, n):
    """n Chebyshev points of the first kind on (a, b), increasing."""
    k = np.arange(n)
    x = -np.cos(np.pi * (k + 0.5) / n)
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _scale(g, r):
    """Magnitude of g' - F after its O(r) parts cancel: |g| + r|g'| + 2r^2."""
    return np.abs(g(r)) + r * np.abs(g.derivative(r)) + 2 * r * r


def _check(g, c, interval, n, sign, kind):
    if not isinstance(g, CandidateFunction):
        raise DomainError("expected a CandidateFunction")
    c = check_speed(c)
    if c != g.c:
        raise DomainError(f"candidate was built for c={g.c}, checked at c={c}")
    a, b = check_interval(interval, "interval")
    if a <= 0.0 or b >= 1.0:
        raise DomainError("interval must lie inside (0, 1)")
    n = int(n)
    if n < 2:
        raise DomainError("need at least two samples")
    r = chebyshev_points(a, b, n)
    m = sign * np.asarray(g.margin_super(r), dtype=float)
    scale = _scale(g, r)
    i = int(np.argmin(m / scale))
    if np.all(m == 0.0) or g.kind == "exact":
        return Certificate(kind, g.tag, c, (a, b), n, False, "exact solution", float(m[i]),
                           float(r[i]), 0.0)
    rel = float(m[i] / scale[i])
    cert = Certificate(kind, g.tag, c, (a, b), n, bool(rel > MARGIN), "strict",
                       float(m[i]), float(r[i]), rel)
    if not cert.passed:
        raise CertificateError(
            f"{g.tag} is not a strict {kind}solution at r={r[i]:.6g} "
            f"(margin {m[i]:.3g})", certificate=cert)
    return cert


def check_supersolution(g, c, interval, n=400):
    """Certify g' > F(r, g) at n Chebyshev samples.

    Strictness means margin > 1e-12 * (|g| + r|g'| + 2r^2).  Near r = 0
    every barrier has g' - F = O(r^2) with O(r) terms cancelling exactly in
    the closed-form margins, so this scale keeps the test meaningful there.
    """
    return _check(g, c, interval, n, 1.0, "super")


def check_subsolution(g, c, interval, n=400):
    """Certify g' < F(r, g) at n Chebyshev samples (relative margin as above)."""
    return _check(g, c, interval, n, -1.0, "sub")


def validity_radius(g, *, sign=1.0, n=4000):
    """Endpoint of the validity interval of a barrier, found numerically.

    For side "prefix" returns the first r where sign * margin drops to
    zero (the interval is (0, r*)); for "suffix" the last r where it rises
    through zero (the interval is (r*, 1)); 1.0 or 0.0 if the margin keeps
    its sign on the whole of (0, 1).
    """
    # log-spaced below 1e-3: prefix radii can be extremely small
    r = np.unique(np.concatenate([np.logspace(-100, -3, n // 2, endpoint=False),
                                  chebyshev_points(1e-3, 1.0, n // 2)]))
    n = r.size

    def f(x):
        return sign * float(g.margin_super(np.array([x]))[0])

    m = sign * np.asarray(g.margin_super(r))
    neg = np.flatnonzero(m <= 0.0)
    if g.side == "prefix":
        if neg.size == 0:
            return 1.0
        i = neg[0]
        if i == 0:
            return 0.0
        return brentq(f, r[i - 1], r[i], xtol=1e-16 * r[i], rtol=1e-15)
    if g.side == "suffix":
        if neg.size == 0:
            return 0.0
        i = neg[-1]
        if i == n - 1:
            return 1.0
        return brentq(f, r[i], r[i + 1], xtol=1e-16 * r[i], rtol=1e-15)
    raise DomainError(f"{g.tag} is declared valid on all of (0, 1)")


def bell_radius(c, lam):
    """Closed form of the prefix radius for bell_lambda outside [lam_-, lam_+]."""
    p = lam * lam - c * lam + 1.0
    return (3.0 - math.sqrt(9.0 - 8.0 * p / lam**2)) / 4.0 if 8 * p < 9 * lam**2 else 1.0


def barrier_certificates(c, n=400):
    """All sub- and supersolution barrier certificates at speed c.

    Returns a list of (name, Certificate or None); None marks a candidate
    whose parameter range is empty at this c.
    """
    c = check_speed(c, minimum=2.0)
    lm, lp = lambda_pm(c)
    out = [("log-square", check_supersolution(CandidateFunction.log_square(c), c, (0.01, 0.99), n))]
    for lam in sorted({lm, 0.5 * (lm + lp), lp}):
        g = CandidateFunction.bell_lambda(c, lam)
        out.append((f"bell-lambda({lam:.6g}) sub", check_subsolution(g, c, (0.01, 0.99), n)))
    for lam in (1.1 * lp, 0.9 * lm):
        g = CandidateFunction.bell_lambda(c, lam)
        rr = validity_radius(g)
        out.append((f"bell-lambda({lam:.6g}) super", check_supersolution(g, c, (0.01 * rr, 0.99 * rr), n)))
    for eps in (0.05, 0.01):
        g = CandidateFunction.bell_scaled(c, eps)
        r0 = validity_radius(g)
        a = r0 + 0.01 * (1 - r0)
        out.append((f"bell-scaled({eps}) super", check_supersolution(g, c, (a, 1 - 1e-6), n)))
    b_lo = 1.0 / lm**2 - 1.0
    if c > 2.0 and b_lo < 1.0:
        beta = 0.5 * (max(b_lo, 0.0) + 1.0)
        g = CandidateFunction.power_bump(c, 1.0, beta)
        rr = validity_radius(g)
        out.append((f"power-bump(1, {beta:.4g}) super",
                    check_supersolution(g, c, (1e-3 * rr, 0.99 * rr), n)))
    else:
        out.append(("power-bump super", None))
    return out


# ---------------------------------------------------------------------------
# recursions


def bootstrap_Mn(c, eps, max_iter=10**6):
    """Iterate M_{n+1} = c(1+eps) - 1/M_n from M_0 = c(1+eps).

    Returns (sequence, first index with M_n <= 0).  For c(1+eps) = 2 cos(t)
    the closed form is M_n = sin((n+2)t)/sin((n+1)t).
    """
    c = check_speed(c)
    eps = check_real(eps, "eps", lo=0.0)
    a = c * (1 + eps)
    if a >= 2.0:
        raise DomainError(f"needs c(1+eps) < 2, got {a}")
    seq = [a]
    m = a
    for n in range(1, max_iter + 1):
        m = a - 1.0 / m
        seq.append(m)
        if m <= 0.0:
            return np.array(seq), n
    raise ConsistencyError(f"M_n stayed positive for {max_iter} steps at c(1+eps)={a}")


def mn_closed_form(a, n):
    t = math.acos(a / 2.0)
    n = np.asarray(n, dtype=float)
    return np.sin((n + 2) * t) / np.sin((n + 1) * t)


def mn_first_negative(a):
    """Closed-form first index n with M_n <= 0."""
    t = math.acos(a / 2.0)
    return math.ceil(math.pi / t - 1e-12) - 2


def kn_root(c, r0):
    """Largest root of (1-r0)^2 X^2 - cX + 1."""
    q = (1 - r0) ** 2
    return (c + math.sqrt(c * c - 4 * q)) / (2 * q)


def bootstrap_Kn(c, r0, K0, tol=1e-12, max_iter=10**7):
    """Iterate K_{n+1} = sqrt(c K_n - 1)/(1 - r0) until steps fall below ``tol``.

    The map contracts with factor c/(2(1-r0)^2 K) at the largest root, so
    convergence is linear except at the double root (c = 2(1-r0)), where it
    is sublinear and the stopping rule leaves an error of order sqrt(tol).
    """
    c = check_speed(c, minimum=2.0)
    r0 = check_real(r0, "r0", lo=0.0, hi=1.0, lo_open=False)
    K0 = check_real(K0, "K0", lo=0.0)
    root = kn_root(c, r0)
    if not K0 > root:
        raise DomainError(f"K0 must exceed the largest root {root!r}")
    k = K0
    q = 1.0 - r0
    for n in range(max_iter):
        arg = c * k - 1.0
        if arg < 0:
            raise ConvergenceError(f"iteration left the domain at step {n}", diagnostics={"K": k})
        k1 = math.sqrt(arg) / q
        if abs(k1 - k) < tol:
            return k1
        k = k1
    raise ConvergenceError(f"no convergence in {max_iter} steps", diagnostics={"K": k})


def epsilon_recursion(c, eps0, tol=1e-15, max_iter=100000):
    """Iterate e_{n+1} = (sqrt(e_n lp^2 + (1-e_n) lm^2) - lm)/(lp - lm).

    Returns (sequence, limit); the sequence increases to 1 with asymptotic
    contraction c/(2 lp).
    """
    c = check_speed(c)
    if c <= 2.0:
        raise DomainError(f"needs c > 2, got {c}")
    eps0 = check_real(eps0, "eps0", lo=0.0, hi=1.0)
    lm, lp = lambda_pm(c)
    seq = [eps0]
    e = eps0
    for _ in range(max_iter):
        e1 = (math.sqrt(e * lp * lp + (1 - e) * lm * lm) - lm) / (lp - lm)
        seq.append(e1)
        if abs(e1 - e) < tol:
            break
        e = e1
    seq = np.array(seq)
    if np.any(np.diff(seq) < -1e-15):
        raise ConsistencyError("epsilon recursion is not increasing")
    return seq, float(seq[-1])


def _profile_samples(profile):
    if isinstance(profile, tuple):
        z, u = (np.asarray(a, dtype=float) for a in profile)
        return z, u
    if getattr(profile, "trace", None) is not None and getattr(profile.trace, "neg_range", None):
        raise DomainError("not a wave profile")
    return profile.z, profile.u


def tw_residual(profile, c, *, u_range=(0.05, 0.95), width=5, max_du=0.05):
    """max |(1-u)u'' + cu' + u(1-u)| over samples with u in ``u_range``.

    ``profile`` is a WaveProfile or a pair (z, u).  Derivatives use
    ``width``-point finite differences on the sample grid.
    """
    c = check_speed(c)
    z, u = _profile_samples(profile)
    if z.size < width or np.any(np.diff(z) <= 0):
        raise ResolutionError("samples must be at least a stencil long and strictly increasing in z")
    m = (u >= u_range[0]) & (u <= u_range[1])
    if m.sum() < 10 or np.max(np.abs(np.diff(u[m]))) > max_du:
        raise ResolutionError(f"grid too coarse on u in {u_range}")
    d1 = fd_weights_grid(z, u, 1, width)
    d2 = fd_weights_grid(z, u, 2, width)
    res = (1 - u) * d2 + c * d1 + u * (1 - u)
    return float(np.max(np.abs(res[m])))


# ---------------------------------------------------------------------------
# weak formulation


@dataclass(frozen=True)
class Bump:
    """amplitude * exp(-1/(1-x^2)), x = (z - center)/half_width, on |x| < 1."""

    center: float
    half_width: float
    amplitude: float = 1.0

    @property
    def support(self):
        return (self.center - self.half_width, self.center + self.half_width)

    def __call__(self, z):
        x = (np.asarray(z, dtype=float) - self.center) / self.half_width
        out = np.zeros_like(x)
        m = np.abs(x) < 1
        out[m] = self.amplitude * np.exp(-1.0 / (1.0 - x[m] ** 2))
        return out

    def derivative(self, z):
        x = (np.asarray(z, dtype=float) - self.center) / self.half_width
        out = np.zeros_like(x)
        m = np.abs(x) < 1
        xm = x[m]
        out[m] = (self.amplitude * np.exp(-1.0 / (1.0 - xm**2))
                  * (-2 * xm / (1 - xm**2) ** 2) / self.half_width)
        return out


_GL = leggauss(16)


def _chart_range(spline, lo_x, hi_x, a, b):
    """x-interval (within [lo_x, hi_x]) where the decreasing w(x) lies in [a, b]."""
    def root(level):
        r = spline.solve(level, extrapolate=False)
        r = r[np.isfinite(r)]
        return float(r[0]) if r.size else None

    w_lo, w_hi = float(spline(hi_x)), float(spline(lo_x))  # w decreases in x
    if b <= w_lo or a >= w_hi:
        return None
    x_start = lo_x if b >= w_hi else root(b)
    x_end = hi_x if a <= w_lo else root(a)
    return x_start, x_end


def weak_residual(profile, c, testfn):
    """| c psi(z*) + int_{z*}^inf [c u psi' + (1-u) u' psi' - u'^2 psi - u(1-u) psi] dz |.

    The integral is evaluated in the chart variables of the trace (log r
    below 1/2, -log(1-r) above) with u' = -sqrt(h), so no derivative of
    samples is needed.
    """
    c = check_speed(c)
    trace = profile.trace
    if trace is None:
        raise DomainError("weak residual needs a profile reconstructed from a trace")
    if testfn.amplitude == 0:
        return 0.0
    a, b = testfn.support
    z_lo = profile.z_star if profile.saturated else profile.z[0]
    if a < z_lo and not profile.saturated or b > profile.z[-1]:
        raise DomainError(f"test support ({a:.4g}, {b:.4g}) exceeds the resolved range "
                          f"({z_lo:.4g}, {profile.z[-1]:.4g})")
    total = 0.0
    for side, segs in (("zero", trace.zero_segments), ("one", trace.one_segments)):
        spline = profile.sides[side]
        xk = spline.x
        rng = _chart_range(spline, xk[0], xk[-1], a, b)
        if rng is None:
            continue
        x0, x1 = rng
        brk = np.concatenate([sg.breaks for sg in segs] + [xk])
        nodes = np.unique(np.concatenate([[x0, x1], brk[(brk > x0) & (brk < x1)]]))
        sq = _side_function(segs, "sqrt_h")
        xg, wg = _GL
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        half = 0.5 * (nodes[1:] - nodes[:-1])
        x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        z = spline(x)
        psi = testfn(z)
        dpsi = testfn.derivative(z)
        g = sq(x)
        if side == "zero":
            r = np.exp(x)
            s = -np.expm1(x)
            jac = r
        else:
            s = np.exp(-x)
            r = -np.expm1(-x)
            jac = s
        f = (c * r * dpsi / g - s * dpsi - g * psi - r * s * psi / g) * jac
        total += float((f.reshape(mid.size, -1) * wg[None, :]).sum(1) @ half)
    boundary = c * float(testfn(np.array([profile.z_star]))[0]) if profile.saturated else 0.0
    return abs(boundary + total)


def bump_family(profile, n=5, half_width=None):
    """``n`` bumps spread over the resolved range; saturated profiles get one at z*."""
    zmax = min(profile.z[-1], 20.0)
    if profile.saturated:
        z0 = profile.z_star
        hw = half_width or 1.0
        centers = np.linspace(z0, zmax - hw, n)
    else:
        z0 = max(profile.z[0], -20.0)
        hw = half_width or 2.0
        centers = np.linspace(z0 + hw, zmax - hw, n)
    return [Bump(float(cz), hw) for cz in centers]
