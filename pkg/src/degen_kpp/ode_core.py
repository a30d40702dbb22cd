"""Singular first-order ODE for the wave phase portrait.

The profile u of a travelling wave with speed c is encoded by
``h = (u')**2 o u^{-1}``, which solves

    dh/dr = 2 c sqrt(h+) / (1 - r) - 2 r,     0 < r < 1.

Both endpoints are singular, so the integrator never works in (r, h)
directly.  It uses four charts:

``k``   x = log r,        state k = sqrt(h) / r      (r <= 1/2, h > 0)
``ht``  x = log r,        state h                    (r <= 1/2, near h = 0)
``g``   x = -log(1 - r),  state g = sqrt(h)          (r >= 1/2, stiff side)
``hs``  x = -log(1 - r),  state h                    (r >= 1/2, forward)

In the ``k`` chart the equation becomes autonomous near r = 0,
dk/dt = c/(1-r) - k - 1/k, whose rest points are the roots of
lambda**2 - c lambda + 1.  Below h = 0 the solution is known in closed
form, h = K - r**2, and is continued analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .exceptions import DomainError, IntegrationError
from .validation import check_radius, check_real, check_speed

TOWARD_ZERO = "toward_zero"
TOWARD_ONE = "toward_one"

_EPS = np.finfo(float).eps
_LOG2 = math.log(2.0)
_T_HALF = -_LOG2


# ---------------------------------------------------------------------------
# constants and tolerances


@dataclass(frozen=True)
class ToleranceSet:
    """Numerical tolerances shared by every operation.

    Parameters
    ----------
    ode_rel, ode_abs : float
        Relative and absolute local error targets of the ODE steppers.
    bisect : float
        Relative width at which threshold bisections stop.
    quad : float
        Absolute target of quadratures.
    fit_window : (float, float)
        Range of r (resp. 1 - r) used for tail fits.
    delta : float
        Sampling cutoff: traces are sampled on [delta, 1 - delta].
    t_deep : float
        Lower limit of log r for endpoint-fate integrations.
    sigma_deep : float
        Upper limit of -log(1 - r) for saturated traces.
    """

    ode_rel: float = 1e-12
    ode_abs: float = 1e-14
    bisect: float = 1e-10
    quad: float = 1e-10
    fit_window: tuple = (1e-6, 1e-3)
    delta: float = 1e-8
    t_deep: float = -700.0
    sigma_deep: float = 700.0

    def __post_init__(self):
        for name in ("ode_rel", "ode_abs", "bisect", "quad", "delta"):
            check_real(getattr(self, name), name, lo=0.0)
        if self.bisect < 1e3 * _EPS:
            raise DomainError(f"bisect must be >= {1e3 * _EPS:.3g}, got {self.bisect}")
        if not self.delta < 1e-2:
            raise DomainError(f"delta must be < 1e-2, got {self.delta}")
        try:
            a, b = self.fit_window
        except (TypeError, ValueError):
            raise DomainError("fit_window must be a pair") from None
        a = check_real(a, "fit_window[0]", lo=0.0)
        b = check_real(b, "fit_window[1]", lo=0.0, hi=0.5)
        if not a < b:
            raise DomainError(f"fit_window must be increasing, got {self.fit_window}")
        object.__setattr__(self, "fit_window", (a, b))
        check_real(self.t_deep, "t_deep", hi=math.log(self.delta))
        check_real(self.sigma_deep, "sigma_deep", lo=-math.log(self.delta), hi=745.0)

    def refined(self, factor=0.5):
        """Copy with ODE tolerances multiplied by ``factor``."""
        return replace(self, ode_rel=self.ode_rel * factor, ode_abs=self.ode_abs * factor)

    def as_dict(self):
        return {
            "ode_rel": self.ode_rel,
            "ode_abs": self.ode_abs,
            "bisect": self.bisect,
            "quad": self.quad,
            "fit_window": list(self.fit_window),
            "delta": self.delta,
            "t_deep": self.t_deep,
            "sigma_deep": self.sigma_deep,
        }


DEFAULT_TOL = ToleranceSet()


def lambda_pm(c):
    """Roots (lambda-, lambda+) of lambda**2 - c lambda + 1 = 0.

    lambda- is computed as 2 / (c + sqrt(c**2 - 4)) to avoid cancellation.
    """
    c = check_speed(c)
    if c < 2.0:
        raise DomainError(f"no real roots of lambda^2 - c lambda + 1 for c={c} < 2")
    disc = math.sqrt((c - 2.0) * (c + 2.0))
    plus = 0.5 * (c + disc)
    minus = 2.0 / (c + disc)
    return minus, plus


@dataclass(frozen=True)
class Speed:
    """A wave speed with its derived constants.

    ``lambda_minus``/``lambda_plus`` are NaN when c < 2.
    """

    c: float
    lambda_minus: float
    lambda_plus: float
    bell_top: float

    @classmethod
    def from_c(cls, c):
        c = check_speed(c)
        if c >= 2.0:
            lm, lp = lambda_pm(c)
        else:
            lm = lp = math.nan
        return cls(c, lm, lp, 1.0 / (16.0 * c * c))

    @property
    def has_waves(self):
        return self.c >= 2.0

    @property
    def plus_bell_top(self):
        """Value (lambda+)**2 / 16 of the lambda+ bell at r = 1/2."""
        return self.lambda_plus**2 / 16.0

    @property
    def zero_exponent(self):
        """p = 1/lambda-**2 - 1, the exponent of the sticking correction at r=0."""
        return 1.0 / self.lambda_minus**2 - 1.0


def rhs(r, h, c):
    """Right-hand side 2 c sqrt(h+)/(1 - r) - 2 r (vectorized)."""
    c = check_speed(c)
    r_arr = np.asarray(r, dtype=float)
    if np.any(~((r_arr > 0.0) & (r_arr < 1.0))):
        raise DomainError("rhs requires 0 < r < 1")
    h_arr = np.asarray(h, dtype=float)
    out = 2.0 * c * np.sqrt(np.maximum(h_arr, 0.0)) / (1.0 - r_arr) - 2.0 * r_arr
    return float(out) if out.ndim == 0 else out


def bell(c, r):
    """The nullcline B(r) = r**2 (1 - r)**2 / c**2 (vectorized)."""
    c = check_speed(c)
    r_arr = np.asarray(r, dtype=float)
    if np.any(~((r_arr >= 0.0) & (r_arr <= 1.0))):
        raise DomainError("bell requires 0 <= r <= 1")
    out = (r_arr * (1.0 - r_arr) / c) ** 2
    return float(out) if out.ndim == 0 else out


def lambda_bell(lam, r, s=None):
    """(lam r (1 - r))**2; ``s`` optionally gives 1 - r accurately."""
    r = np.asarray(r, dtype=float)
    s = 1.0 - r if s is None else np.asarray(s, dtype=float)
    return (lam * r * s) ** 2


def log_square_bound(c, r, s=None):
    """Upper envelope c**2 log(1 - r)**2."""
    r = np.asarray(r, dtype=float)
    lg = np.log1p(-r) if s is None else np.log(np.asarray(s, dtype=float))
    return (c * lg) ** 2


# ---------------------------------------------------------------------------
# charts


def _r_t(t):
    return np.exp(t)


def _s_t(t):
    return -np.expm1(t)


def _r_sigma(x):
    return -np.expm1(-x)


def _s_sigma(x):
    return np.exp(-x)


class Segment:
    """Dense state of a trace on one chart interval [lo, hi] of x.

    ``fun`` maps an array of x to the chart state; ``breaks`` are the
    solver step points (or panel edges), used as quadrature breakpoints.
    """

    ZERO_SIDE = ("k", "ht")

    def __init__(self, kind, lo, hi, fun, breaks):
        if kind not in ("k", "ht", "g", "hs"):
            raise ValueError(kind)
        self.kind = kind
        self.lo = float(min(lo, hi))
        self.hi = float(max(lo, hi))
        self._fun = fun
        b = np.unique(np.asarray(breaks, dtype=float))
        self.breaks = b[(b >= self.lo) & (b <= self.hi)]

    def __repr__(self):
        return f"Segment({self.kind!r}, {self.lo:.6g}, {self.hi:.6g})"

    @property
    def zero_side(self):
        return self.kind in self.ZERO_SIDE

    def state(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self._fun(x), dtype=float).reshape(x.shape)

    def rs(self, x):
        if self.zero_side:
            return _r_t(x), _s_t(x)
        return _r_sigma(x), _s_sigma(x)

    def x_of(self, r, s):
        return np.log(r) if self.zero_side else -np.log(s)

    def sqrt_h(self, x):
        y = self.state(x)
        if self.kind == "k":
            return y * _r_t(x)
        if self.kind == "g":
            return y
        return np.sqrt(np.maximum(y, 0.0))

    def h(self, x):
        y = self.state(x)
        if self.kind == "k":
            return (y * _r_t(x)) ** 2
        if self.kind == "g":
            return y * y
        return y

    def dw_dx(self, x):
        """Derivative of w(r) = int_r^{1/2} ds/sqrt(h) in the chart variable."""
        r, s = self.rs(x)
        if self.kind == "k":
            return -1.0 / self.state(x)
        if self.zero_side:
            return -r / self.sqrt_h(x)
        return -s / self.sqrt_h(x)

    def contains(self, x, slack=1e-12):
        pad = slack * max(1.0, abs(self.lo), abs(self.hi))
        return (x >= self.lo - pad) & (x <= self.hi + pad)


class Event(NamedTuple):
    """A tagged point of a trace.

    ``kind`` is one of ``"zero"`` (downhill crossing of h = 0), ``"bell"``
    (crossing of B, i.e. h' = 0), ``"bell_minus"``/``"bell_plus"``
    (crossings of the lambda-/lambda+ bells).  ``slope`` is dh/dr
    measured on the dense output at the event.
    """

    kind: str
    r: float
    h: float
    slope: float


# ---------------------------------------------------------------------------
# chart right-hand sides (scalar, called by the stepper)


def _f_k(c):
    def f(t, y):
        k = y[0]
        return [c / (-math.expm1(t)) - k - 1.0 / k]

    def jac(t, y):
        k = y[0]
        return [[-1.0 + 1.0 / (k * k)]]

    return f, jac


def _f_ht(c):
    def f(t, y):
        r = math.exp(t)
        return [r * (2.0 * c * math.sqrt(max(y[0], 0.0)) / (-math.expm1(t)) - 2.0 * r)]

    return f


def _f_g(c):
    def f(x, y):
        s = math.exp(-x)
        return [c - (-math.expm1(-x)) * s / y[0]]

    def jac(x, y):
        s = math.exp(-x)
        return [[(-math.expm1(-x)) * s / (y[0] * y[0])]]

    return f, jac


def _f_hs(c):
    def f(x, y):
        s = math.exp(-x)
        return [2.0 * c * math.sqrt(max(y[0], 0.0)) - 2.0 * (-math.expm1(-x)) * s]

    return f


def _curve_events(c, kind, spd):
    """Event functions (name, fun) measuring state minus a reference curve."""
    lams = []
    if c >= 2.0:
        lams = [("bell_minus", spd.lambda_minus), ("bell_plus", spd.lambda_plus)]
    out = []
    if kind == "k":
        out.append(("bell", lambda t, y: y[0] - (-math.expm1(t)) / c))
        for name, lam in lams:
            out.append((name, lambda t, y, lam=lam: y[0] - lam * (-math.expm1(t))))
    elif kind == "g":
        out.append(("bell", lambda x, y: y[0] - (-math.expm1(-x)) * math.exp(-x) / c))
        for name, lam in lams:
            out.append((name, lambda x, y, lam=lam: y[0] - lam * (-math.expm1(-x)) * math.exp(-x)))
    elif kind == "ht":
        out.append(("bell", lambda t, y: y[0] - (math.exp(t) * (-math.expm1(t)) / c) ** 2))
        for name, lam in lams:
            out.append((name, lambda t, y, lam=lam: y[0] - (lam * math.exp(t) * (-math.expm1(t))) ** 2))
    else:
        out.append(("bell", lambda x, y: y[0] - ((-math.expm1(-x)) * math.exp(-x) / c) ** 2))
        for name, lam in lams:
            out.append((name, lambda x, y, lam=lam: y[0] - (lam * (-math.expm1(-x)) * math.exp(-x)) ** 2))
    return out


def _terminal(fun, direction=0):
    fun.terminal = True
    fun.direction = direction
    return fun


def _solve(f, x0, x1, y0, tol, *, method="DOP853", jac=None, events=(), atol=None):
    kw = {}
    if jac is not None and method in ("LSODA", "Radau", "BDF"):
        kw["jac"] = jac
    sol = solve_ivp(
        f,
        (x0, x1),
        [y0],
        method=method,
        rtol=tol.ode_rel,
        atol=tol.ode_abs if atol is None else atol,
        dense_output=True,
        events=list(events) or None,
        **kw,
    )
    if sol.status < 0 or not np.all(np.isfinite(sol.y)):
        raise IntegrationError(
            f"integration failed in [{x0:.6g}, {x1:.6g}]: {sol.message}",
            state=(float(sol.t[-1]), float(sol.y[0, -1])),
        )
    return sol


def _collect_events(t_events, names, seg, x0):
    """Convert solve_ivp event times to Event records (skipping the start)."""
    out = []
    if t_events is None:
        return out
    for name, ts in zip(names, t_events):
        for xe in ts:
            if abs(xe - x0) <= 1e-12 * max(1.0, abs(x0)):
                continue
            r, s = seg.rs(xe)
            out.append(Event(name, float(r), float(seg.h(xe)), _slope(seg, float(xe))))
    return out


def _slope(seg, xe):
    """dh/dr at xe from a central difference of the dense output."""
    dx = 1e-6 * max(1.0, abs(xe))
    a = max(seg.lo, xe - dx)
    b = min(seg.hi, xe + dx)
    if b <= a:
        return math.nan
    ra, sa = seg.rs(a)
    rb, sb = seg.rs(b)
    return float((seg.h(b) - seg.h(a)) / (rb - ra))


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True, eq=False)
class HTrace:
    """A sampled solution of the h-equation.

    Attributes
    ----------
    c : float
    alpha : float or None
        h(1/2) when the trace covers r = 1/2 on its positive part; None for
        the exact negative branch.
    r, s, h : ndarray
        Samples, strictly increasing in r; ``s`` holds 1 - r to full
        relative precision (needed near r = 1).
    events : tuple of Event
    tol : ToleranceSet
    interp_error : float
        Max error of linear interpolation between samples, relative to
        |h| + B(r).
    segments : tuple of Segment
        Dense chart pieces covering the positive part.
    neg_K : float or None
        On the negative part h = neg_K - r**2.
    neg_range : (float, float) or None
        r-interval of the negative part.
    meta : dict
        Free-form diagnostics.
    """

    c: float
    alpha: float | None
    r: np.ndarray
    s: np.ndarray
    h: np.ndarray
    events: tuple
    tol: ToleranceSet
    interp_error: float
    segments: tuple = field(default=(), repr=False)
    neg_K: float | None = None
    neg_range: tuple | None = None
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def samples(self):
        return np.column_stack([self.r, self.h])

    @property
    def speed(self):
        return Speed.from_c(self.c)

    @property
    def crosses_zero(self):
        return any(e.kind == "zero" for e in self.events)

    @property
    def r_cross(self):
        for e in self.events:
            if e.kind == "zero":
                return e.r
        return None

    @property
    def positive(self):
        """True when h > 0 at every sample."""
        return bool(np.all(self.h > 0.0)) and self.neg_range is None

    @property
    def zero_segments(self):
        return tuple(sg for sg in self.segments if sg.zero_side)

    @property
    def one_segments(self):
        return tuple(sg for sg in self.segments if not sg.zero_side)

    @property
    def sigma_max(self):
        """Largest -log(1 - r) reached on the positive part (or None)."""
        one = self.one_segments
        return max(sg.hi for sg in one) if one else None

    @property
    def t_min(self):
        z = self.zero_segments
        return min(sg.lo for sg in z) if z else None

    def __call__(self, r, s=None):
        return self.evaluate(r, s)

    def evaluate(self, r, s=None):
        """Evaluate h on the dense output (vectorized).

        Points outside the covered range give NaN.
        """
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        s = 1.0 - r if s is None else np.atleast_1d(np.asarray(s, dtype=float))
        out = np.full(r.shape, np.nan)
        if self.neg_range is not None:
            a, b = self.neg_range
            m = (r >= a * (1 - 1e-15)) & (r <= b * (1 + 1e-15))
            out[m] = self.neg_K - r[m] ** 2
        for sg in self.segments:
            with np.errstate(divide="ignore", invalid="ignore"):
                x = sg.x_of(r, s)
            m = np.isnan(out) & np.isfinite(x) & sg.contains(x)
            if np.any(m):
                out[m] = sg.h(np.clip(x[m], sg.lo, sg.hi))
        return float(out[0]) if scalar else out

    def chart_segment(self, kind_side):
        """Return segments of one side, ``"zero"`` or ``"one"``."""
        return self.zero_segments if kind_side == "zero" else self.one_segments

    def check_envelope(self):
        """Max violation of -r**2 <= h <= c**2 log(1-r)**2 at the samples."""
        lower = -self.r**2 - self.h
        upper = self.h - log_square_bound(self.c, self.r, self.s)
        return float(max(np.max(lower), np.max(upper)))

    def critical_radii(self):
        """Interior radii where h' = 0 (crossings of the bell), sorted."""
        return tuple(sorted(e.r for e in self.events if e.kind == "bell"))

    def to_columns(self):
        return {"r": self.r, "h": self.h}


def _grid(r_lo, r_hi, s_lo, s_hi, n_mid, n_tail, delta):
    """Sample grid: log-spaced near both ends, uniform in the middle.

    Returns (r, s) with s = 1 - r accurate near r = 1.
    """
    r_parts, s_parts = [], []
    a = max(r_lo, delta)
    if a < 0.01:
        rr = np.geomspace(a, 0.01, n_tail, endpoint=False)
        r_parts.append(rr)
        s_parts.append(1.0 - rr)
    rr = np.linspace(0.01, 0.99, n_mid + 1)
    r_parts.append(rr)
    s_parts.append(1.0 - rr)
    b = max(s_lo, delta)
    if b < 0.01:
        ss = np.geomspace(0.01, b, n_tail + 1)[1:]
        r_parts.append(1.0 - ss)
        s_parts.append(ss)
    r = np.concatenate(r_parts)
    s = np.concatenate(s_parts)
    keep = (r >= r_lo * (1 - 1e-14)) & (r <= r_hi) & (s >= s_lo * (1 - 1e-14)) & (s <= s_hi)
    r, s = r[keep], s[keep]
    # make sure the covered endpoints are sampled
    extra_r, extra_s = [], []
    if r_lo >= delta and (r.size == 0 or r[0] > r_lo * (1 + 1e-12)):
        extra_r.append(r_lo)
        extra_s.append(s_hi)
    if s_lo >= delta and (s.size == 0 or s[-1] > s_lo * (1 + 1e-12)):
        extra_r.append(r_hi)
        extra_s.append(s_lo)
    if extra_r:
        r = np.concatenate([r, extra_r])
        s = np.concatenate([s, extra_s])
    order = np.argsort(r, kind="stable")
    r, s = r[order], s[order]
    keep = np.concatenate([[True], np.diff(r) > 0])
    return r[keep], s[keep]


def _assemble(c, alpha, segments, events, tol, *, neg_K=None, neg_range=None,
              r_range, s_range, samples=800, meta=None):
    """Sample the dense pieces and build an HTrace."""
    n_mid = max(int(samples), 16)
    n_tail = max(n_mid // 4, 16)
    r_lo, r_hi = r_range
    s_lo, s_hi = s_range
    r, s = _grid(r_lo, r_hi, s_lo, s_hi, n_mid, n_tail, tol.delta)
    # events inside the unsampled end layers come from seeding transients
    events = [e for e in events if tol.delta <= e.r <= 1.0 - tol.delta]
    tr = HTrace(c, alpha, r, s, np.zeros_like(r), tuple(sorted(events, key=lambda e: e.r)),
                tol, 0.0, tuple(segments), neg_K, neg_range, dict(meta or {}))
    h = tr.evaluate(r, s)
    if np.any(np.isnan(h)):
        bad = r[np.isnan(h)]
        raise IntegrationError(f"trace does not cover samples, e.g. r={bad[0]!r}")
    rm = 0.5 * (r[1:] + r[:-1])
    sm = 0.5 * (s[1:] + s[:-1])
    hm = tr.evaluate(rm, sm)
    lin = 0.5 * (h[1:] + h[:-1])
    # relative to |h| plus the natural local scale (r (1-r))**2 / c**2,
    # which keeps the measure meaningful where h passes through 0
    scale = np.abs(hm) + (rm * sm / c) ** 2 + tol.ode_abs
    err = float(np.max(np.abs(hm - lin) / scale)) if hm.size else 0.0
    object.__setattr__(tr, "h", h)
    object.__setattr__(tr, "interp_error", err)
    return tr


def _check_start(c, start):
    try:
        r0, h0 = start
    except (TypeError, ValueError):
        raise DomainError(f"start must be a pair (r0, h0), got {start!r}") from None
    r0 = check_radius(r0, "r0")
    h0 = check_real(h0, "h0")
    if h0 < -r0 * r0 * (1.0 + 4 * _EPS):
        raise DomainError(f"start lies below the exact branch -r^2: h0={h0} < {-r0 * r0}")
    return r0, max(h0, -r0 * r0)


def _zero_chart_backward(c, t0, k0, t1, tol, *, stiff=False, events=True):
    """k chart from t0 down to t1 < t0."""
    spd = Speed.from_c(c)
    f, jac = _f_k(c)
    ev = _curve_events(c, "k", spd) if events else []
    sol = _solve(f, t0, t1, k0, tol, method="LSODA" if stiff else "DOP853", jac=jac,
                 events=[e for _, e in ev])
    seg = Segment("k", sol.t[-1], t0, sol.sol, sol.t)
    return seg, _collect_events(sol.t_events, [n for n, _ in ev], seg, t0)


def _one_chart_backward(c, x0, g0, x1, tol, *, events=True):
    """g chart from sigma = x0 down to x1 < x0 (stiff, LSODA)."""
    spd = Speed.from_c(c)
    f, jac = _f_g(c)
    ev = _curve_events(c, "g", spd) if events else []
    atol = tol.ode_abs * 1e-10
    sol = _solve(f, x0, x1, g0, tol, method="LSODA", jac=jac, events=[e for _, e in ev], atol=atol)
    seg = Segment("g", x1, x0, sol.sol, sol.t)
    return seg, _collect_events(sol.t_events, [n for n, _ in ev], seg, x0)


def _zero_layer_seed(c, r0, s0):
    """Backward seed just off a start on h = 0.

    Near such a start dh/dr = -2 r, so moving back by a small step gives
    h ~ 2 r0 dr.  Returns (x, state, chart) for the chart on that side.
    """
    if r0 <= 0.51:
        dt = 1e-10
        r1 = r0 * math.exp(-dt)
        h1 = 2.0 * r0 * (r0 - r1) - 4.0 * c * (2.0 * r0) ** 0.5 * (r0 - r1) ** 1.5 / (3.0 * s0)
        return math.log(r1), math.sqrt(max(h1, 0.0)) / r1, "k"
    d = 1e-3 * s0
    x0 = -math.log(s0)
    return x0 - d, math.sqrt(2.0 * r0 * s0 * d), "g"


def _backward_positive(c, r0, s0, h0, tol, r_end, *, from_zero=False):
    """Segments and events of a positive backward trace from (r0, h0) to r_end."""
    segments, events = [], []
    t_end = math.log(r_end)
    stiff = from_zero
    if from_zero:
        x, y, chart = _zero_layer_seed(c, r0, s0)
    elif r0 > 0.5:
        x, y, chart = -math.log(s0), math.sqrt(h0), "g"
    else:
        x, y, chart = math.log(r0), math.sqrt(h0) / r0, "k"
    if chart == "g":
        seg, ev = _one_chart_backward(c, x, y, _LOG2, tol)
        segments.append(seg)
        events += ev
        y = float(seg.state(_LOG2)) / 0.5
        x = _T_HALF
        stiff = False
    if x > t_end:
        seg, ev = _zero_chart_backward(c, x, y, t_end, tol, stiff=stiff)
        segments.append(seg)
        events += ev
    return segments, events


_NEAR_ZERO = 0.1  # sqrt(h) below this fraction of the bell height triggers the crossing chart


def _crossing_piece(c, side, x_e, g_e, tol):
    """Finish a downhill approach to h = 0 in the inverse chart x(g).

    Near a crossing sqrt(h) behaves like (x_c - x)**(1/2), so h(x) is not
    smooth, but x as a function of g = sqrt(h) is: dx/dg = g / (c g' - r s)
    with smooth coefficients.  Returns a Segment (cubic Hermite in x with
    exact slopes) and the crossing abscissa x_c.
    """
    if side == "zero":
        # g here is k = sqrt(h)/r, dt/dk = k / (c k / s - k**2 - 1)
        def f(g, y):
            t = y[0]
            return [g / (c * g / (-math.expm1(t)) - g * g - 1.0)]
    else:
        def f(g, y):
            x = y[0]
            return [g / (c * g - (-math.expm1(-x)) * math.exp(-x))]

    sol = solve_ivp(f, (g_e, 0.0), [x_e], method="DOP853", rtol=tol.ode_rel,
                    atol=tol.ode_abs, dense_output=True)
    if sol.status < 0:
        raise IntegrationError(f"crossing chart failed: {sol.message}", state=(g_e, x_e))
    theta = np.linspace(0.0, 0.5 * math.pi, 65)
    gg = g_e * np.cos(theta)  # clustered at both ends
    xx = sol.sol(gg)[0]
    if side == "zero":
        r = np.exp(xx)
        hh = (gg * r) ** 2
        dh = r * (2.0 * c * gg * r / (-np.expm1(xx)) - 2.0 * r) * r
        kind = "ht"
    else:
        r = -np.expm1(-xx)
        hh = gg**2
        dh = 2.0 * c * gg - 2.0 * r * np.exp(-xx)
        kind = "hs"
    xx[-1] = float(sol.y[0, -1])
    hh[-1] = 0.0
    order = np.argsort(xx)
    xx, hh, dh = xx[order], hh[order], dh[order]
    keep = np.concatenate([[True], np.diff(xx) > 0])
    spline = CubicHermiteSpline(xx[keep], hh[keep], dh[keep])
    seg = Segment(kind, xx[0], xx[-1], spline, xx[keep])
    return seg, float(sol.y[0, -1])


def _forward_positive(c, r0, s0, h0, tol):
    """Segments/events of a forward trace from (r0, h0 > 0).

    Returns (segments, events, r_cross, status) where status is one of
    ``"cross"``, ``"saturated"`` (continued to sigma_deep) or ``"bounded"``.
    """
    spd = Speed.from_c(c)
    segments, events = [], []
    if r0 < 0.5:
        t0 = math.log(r0)
        f, jac = _f_k(c)
        ev = _curve_events(c, "k", spd)
        low = _terminal(lambda t, y: y[0] - _NEAR_ZERO * (-math.expm1(t)) / c, -1)
        sol = _solve(f, t0, _T_HALF, math.sqrt(h0) / r0, tol, events=[low] + [e for _, e in ev])
        seg = Segment("k", t0, sol.t[-1], sol.sol, sol.t)
        segments.append(seg)
        events += _collect_events(sol.t_events[1:], [n for n, _ in ev], seg, t0)
        if sol.status == 1:
            piece, tc = _crossing_piece(c, "zero", float(sol.t[-1]), float(sol.y[0, -1]), tol)
            segments.append(piece)
            rc = math.exp(tc)
            events.append(Event("zero", rc, 0.0, _slope(piece, tc)))
            return segments, events, rc, "cross"
        x0 = _LOG2
        h_start = float(seg.h(_T_HALF))
    else:
        x0 = -math.log(s0)
        h_start = h0
    sigma_cut = -math.log(tol.delta)
    f = _f_hs(c)
    ev = _curve_events(c, "hs", spd)
    low = _terminal(
        lambda x, y: math.sqrt(max(y[0], 0.0)) - _NEAR_ZERO * (-math.expm1(-x)) * math.exp(-x) / c, -1
    )
    x_end = max(sigma_cut, x0)
    if x0 < x_end:
        sol = _solve(f, x0, x_end, h_start, tol, events=[low] + [e for _, e in ev],
                     atol=tol.ode_abs * 1e-10)
        seg = Segment("hs", x0, sol.t[-1], sol.sol, sol.t)
        segments.append(seg)
        events += _collect_events(sol.t_events[1:], [n for n, _ in ev], seg, x0)
        if sol.status == 1:
            xe = float(sol.t[-1])
            piece, xc = _crossing_piece(c, "one", xe, math.sqrt(max(float(sol.y[0, -1]), 0.0)), tol)
            if xc <= x_end:
                segments.append(piece)
                rc = -math.expm1(-xc)
                events.append(Event("zero", rc, 0.0, _slope(piece, xc)))
                return segments, events, rc, "cross"
            # crossing lies beyond the cutoff: keep the piece up to it
            segments.append(piece)
            return segments, events, None, "bounded"
        x_cur, h_cur = float(sol.t[-1]), float(sol.y[0, -1])
    else:
        x_cur, h_cur = x0, h_start
    s_cur = math.exp(-x_cur)
    r_cur = -math.expm1(-x_cur)
    if h_cur > (r_cur * s_cur / c) ** 2 and x_cur < tol.sigma_deep:
        # above the bell: h grows like (c sigma)^2; follow g to sigma_deep
        f, jac = _f_g(c)
        sol = _solve(f, x_cur, tol.sigma_deep, math.sqrt(h_cur), tol)
        segments.append(Segment("g", x_cur, tol.sigma_deep, sol.sol, sol.t))
        return segments, events, None, "saturated"
    return segments, events, None, "bounded"


def integrate(c, start, direction=TOWARD_ZERO, tol=DEFAULT_TOL, *, samples=800):
    """Integrate the h-equation from ``start`` in one direction.

    Parameters
    ----------
    c : float
    start : (float, float)
        Initial point (r0, h0) with 0 < r0 < 1 and h0 >= -r0**2.
    direction : {"toward_zero", "toward_one"}
    tol : ToleranceSet
    samples : int
        Number of uniform samples in [0.01, 0.99]; each log-spaced end
        region gets a quarter of that.

    Returns
    -------
    HTrace
        Covering [max(delta, .), r0] or [r0, 1 - delta].  Downhill zero
        crossings are recorded and continued analytically as h = K - r**2.
    """
    c = check_speed(c)
    r0, h0 = _check_start(c, start)
    if direction not in (TOWARD_ZERO, TOWARD_ONE):
        raise DomainError(f"direction must be {TOWARD_ZERO!r} or {TOWARD_ONE!r}")
    s0 = 1.0 - r0
    delta = tol.delta
    segments, events = [], []
    neg_K = neg_range = None
    meta = {"start": (r0, h0), "direction": direction}

    if direction == TOWARD_ONE:
        if r0 >= 1.0 - delta:
            raise DomainError(f"start r0={r0} is beyond the sampling cutoff 1-delta")
        if h0 <= 0.0:
            # zero is a downhill crossing (h' = -2 r there)
            neg_K = h0 + r0 * r0
            neg_range = (r0, 1.0 - delta)
            if h0 == 0.0:
                events.append(Event("zero", r0, 0.0, -2.0 * r0))
            meta["status"] = "negative"
        else:
            segments, events, rc, status = _forward_positive(c, r0, s0, h0, tol)
            meta["status"] = status
            if rc is not None:
                neg_K = rc * rc
                neg_range = (rc, 1.0 - delta)
        r_range = (r0, 1.0 - delta)
        s_range = (delta, s0)
    else:
        if r0 <= delta:
            raise DomainError(f"start r0={r0} is below the sampling cutoff delta")
        r_end = delta
        if h0 < 0.0:
            K = h0 + r0 * r0
            rc = math.sqrt(K)
            if rc <= delta:
                neg_K, neg_range = K, (delta, r0)
                meta["status"] = "negative"
            else:
                neg_K, neg_range = K, (rc, r0)
                events.append(Event("zero", rc, 0.0, -2.0 * rc))
                segments, ev = _backward_positive(c, rc, 1.0 - rc, 0.0, tol, r_end, from_zero=True)
                events += ev
                meta["status"] = "positive"
        else:
            segments, ev = _backward_positive(c, r0, s0, h0, tol, r_end, from_zero=(h0 == 0.0))
            events += ev
            if h0 == 0.0:
                events.append(Event("zero", r0, 0.0, -2.0 * r0))
            meta["status"] = "positive"
        r_range = (delta, r0)
        s_range = (s0, 1.0 - delta)
    alpha = None
    tr = _assemble(c, alpha, segments, events, tol, neg_K=neg_K, neg_range=neg_range,
                   r_range=r_range, s_range=s_range, samples=samples, meta=meta)
    if neg_K is None or neg_K > 0.0:
        a = tr.evaluate(0.5) if r_range[0] <= 0.5 <= r_range[1] else None
        if a is not None and not np.isnan(a):
            object.__setattr__(tr, "alpha", float(a))
    return tr


def merge(back, fwd, *, samples=800):
    """Join a backward and a forward trace that share their start point."""
    if back.c != fwd.c:
        raise DomainError("traces have different speeds")
    tol = back.tol
    segments = back.segments + fwd.segments
    events = [e for e in back.events] + [e for e in fwd.events if not any(
        e.kind == b.kind and abs(e.r - b.r) < 1e-12 for b in back.events)]
    neg_K, neg_range = fwd.neg_K, fwd.neg_range
    if back.neg_range is not None:
        if fwd.neg_range is None or abs(back.neg_K - fwd.neg_K) > 1e-15:
            raise DomainError("backward and forward traces do not share a start point")
        neg_range = (back.neg_range[0], fwd.neg_range[1])
    meta = {"backward": back.meta, "forward": fwd.meta}
    tr = _assemble(back.c, None, segments, events, tol, neg_K=neg_K, neg_range=neg_range,
                   r_range=(back.r[0], fwd.r[-1]), s_range=(fwd.s[-1], back.s[0]),
                   samples=samples, meta=meta)
    a = tr.evaluate(0.5)
    if not np.isnan(a) and a > 0.0:
        object.__setattr__(tr, "alpha", float(a))
    return tr


def shoot(c, alpha, tol=DEFAULT_TOL, *, samples=800):
    """Trace through (1/2, alpha) in both directions."""
    c = check_speed(c)
    alpha = check_real(alpha, "alpha", lo=-0.25, lo_open=False)
    back = integrate(c, (0.5, alpha), TOWARD_ZERO, tol, samples=samples)
    fwd = integrate(c, (0.5, alpha), TOWARD_ONE, tol, samples=samples)
    tr = merge(back, fwd, samples=samples)
    if alpha >= 0.0:
        object.__setattr__(tr, "alpha", float(alpha))
    return tr


# ---------------------------------------------------------------------------
# fate at r = 0


@dataclass(frozen=True)
class ZeroFate:
    """Behaviour of a backward trace as r -> 0.

    kind : "zero" (h(0) = 0 certified: k < lambda+ somewhere),
        "positive" (h(0) > 0 certified: k >= c/(1-r) somewhere), or
        "undecided" (neither before t_deep).
    touches_minus, touches_plus : bool or None
        Whether h meets the lambda-/lambda+ bell on (0, r0].  None when
        not determined (c < 2, or stopped early).
    t_end, k_end : float
        Last log r and k = sqrt(h)/r reached.
    h0_estimate : float
        Extrapolated h(0): 0 for "zero", (k r)**2 at the last point
        otherwise.
    """

    kind: str
    touches_minus: bool | None
    touches_plus: bool | None
    t_end: float
    k_end: float
    h0_estimate: float


def zero_fate(c, r0, h0, tol=DEFAULT_TOL, *, want_touch=False):
    """Decide h(0) = 0 vs h(0) > 0 for the backward trace from (r0, h0).

    Uses backward-invariant regions of the k chart: (0, lambda+) for the
    zero case and [c/(1-r), inf) for the positive case.  With
    ``want_touch`` the integration continues to t_deep to decide whether
    the lambda-/lambda+ bells are met.  For c >= 2 the state is the
    scaled deviation y = (k - lambda-)/r**m, m = min(p, 1), which keeps
    full precision while k sticks to lambda-.
    """
    c = check_speed(c)
    r0 = check_real(r0, "r0", lo=0.0, hi=0.5, hi_open=False)
    h0 = check_real(h0, "h0", lo=0.0)
    t0 = math.log(r0)
    s0 = 1.0 - r0
    k0 = math.sqrt(h0) / r0
    t_min = tol.t_deep
    if k0 >= c / s0:
        return ZeroFate("positive", False, False, t0, k0, h0)
    if c < 2.0:
        f, _ = _f_k(c)
        pos = _terminal(lambda t, y: y[0] - c / (-math.expm1(t)), 1)
        sol = solve_ivp(f, (t0, t_min), [k0], method="DOP853", rtol=tol.ode_rel,
                        atol=tol.ode_abs, events=[pos])
        t_end, k_end = float(sol.t[-1]), float(sol.y[0, -1])
        kind = "positive" if sol.status == 1 else "undecided"
        return ZeroFate(kind, None, None, t_end, k_end, (k_end * math.exp(t_end)) ** 2)

    spd = Speed.from_c(c)
    lm, lp = spd.lambda_minus, spd.lambda_plus
    touch_m = k0 <= lm * s0
    touch_p = k0 <= lp * s0
    zero_now = k0 < lp
    if touch_m or (zero_now and not want_touch):
        return ZeroFate("zero", touch_m if want_touch or touch_m else None,
                        touch_p if want_touch or touch_p else None, t0, k0, 0.0)
    p = spd.zero_exponent
    m = min(p, 1.0)
    lam2 = lm * lm

    def f(t, y):
        r = math.exp(t)
        rm = r**m
        yy = y[0]
        return [c * r ** (1.0 - m) / (-math.expm1(t)) + (p - m) * yy
                - yy * yy * rm / (lam2 * (lm + yy * rm))]

    def k_of(t, y):
        return lm + y[0] * math.exp(t) ** m

    def e_pos(t, y):
        return k_of(t, y) - c / (-math.expm1(t))

    def e_zero(t, y):
        return k_of(t, y) - lp

    def e_m(t, y):
        r = math.exp(t)
        return y[0] + lm * r ** (1.0 - m)

    def e_p(t, y):
        r = math.exp(t)
        return k_of(t, y) - lp * (1.0 - r)

    _terminal(e_pos, 0)
    e_m.terminal = True
    e_zero.terminal = not want_touch
    y0 = (k0 - lm) / r0**m
    sol = solve_ivp(f, (t0, t_min), [y0], method="DOP853", rtol=tol.ode_rel,
                    atol=1e-300, events=[e_pos, e_zero, e_m, e_p])
    if sol.status < 0:
        raise IntegrationError(f"fate integration failed: {sol.message}",
                               state=(float(sol.t[-1]), float(sol.y[0, -1])))
    t_end = float(sol.t[-1])
    y_end = float(sol.y[0, -1])
    k_end = lm + y_end * math.exp(t_end) ** m
    hit_pos = sol.t_events[0].size > 0
    hit_zero = zero_now or sol.t_events[1].size > 0
    hit_m = sol.t_events[2].size > 0
    hit_p = touch_p or sol.t_events[3].size > 0
    if hit_pos:
        kind = "positive"
    elif hit_zero or hit_m:
        kind = "zero"
    else:
        kind = "undecided"
    if not want_touch:
        tm = True if hit_m else None
        tp = True if hit_p else None
        h0e = 0.0 if kind == "zero" else (k_end * math.exp(t_end)) ** 2
        return ZeroFate(kind, tm, tp, t_end, k_end, h0e)
    if kind == "positive":
        tm, tp = hit_m, hit_p
    elif hit_m:
        tm, tp = True, True
    else:
        # y settles to a constant C as t -> -inf; the lambda- bell is met
        # eventually iff C < 0, and the lambda+ bell iff k < lambda+.
        tm = y_end + lm * math.exp(t_end) ** (1.0 - m) <= 0.0
        if not hit_p:
            hit_p = k_end <= lp * (-math.expm1(t_end)) or (kind == "zero" and lp > lm)
        tp = bool(hit_p or tm)
    h0e = 0.0 if kind == "zero" else (k_end * math.exp(t_end)) ** 2
    return ZeroFate(kind, bool(tm), bool(tp), t_end, k_end, h0e)
