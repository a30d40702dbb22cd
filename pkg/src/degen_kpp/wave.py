"""Travelling-wave profiles reconstructed from h-traces.

With w(r) = int_r^{1/2} ds / sqrt(h(s)), the profile is u = w^{-1}, so
the samples (w(r), r) of a trace are samples (z, u) of the wave with
u(0) = 1/2.  The front position is z* = w(1), finite for saturated waves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq
from scipy.special import exp1

from ._fd import fd_weights_grid
from .exceptions import (
    ConsistencyError,
    DomainError,
    EstimationError,
    IntegrationError,
)
from .ode_core import DEFAULT_TOL, Speed, rhs, zero_fate
from .shooting import WaveKind

_LOG2 = math.log(2.0)
_T_HALF = -_LOG2
_GL_HI = leggauss(20)
_GL_LO = leggauss(10)
_SAT_Q = 10.0  # q = sqrt(h)/(r(1-r)) above SAT_Q/c at the cutoff: saturated
_NS_Q = 2.0  # below NS_Q/c: bounded, z* = -inf


# ---------------------------------------------------------------------------
# quadrature on dense output


def _gl(f, a, b, rule):
    x, w = rule
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return (f(pts.ravel()).reshape(pts.shape) * w[None, :]).sum(1) * half


def _panel_integrals(f, nodes, tol, max_split=30):
    """Integrals of f over consecutive node intervals.

    20-point Gauss-Legendre per interval, checked against 10 points;
    intervals whose difference exceeds ``tol`` are bisected.
    """
    a, b = nodes[:-1], nodes[1:]
    hi = _gl(f, a, b, _GL_HI)
    lo = _gl(f, a, b, _GL_LO)
    bad = np.abs(hi - lo) > tol
    if np.any(bad):
        if max_split == 0:
            raise IntegrationError(
                f"quadrature did not converge on {int(bad.sum())} intervals "
                f"(max error estimate {np.max(np.abs(hi - lo)):.3g})")
        for i in np.flatnonzero(bad):
            sub = np.linspace(a[i], b[i], 5)
            hi[i] = _panel_integrals(f, sub, tol / 4, max_split - 1).sum()
    err = float(np.max(np.abs(hi - lo))) if hi.size else 0.0
    return hi, err


def _side_function(segments, attr):
    """Evaluate ``attr`` (a Segment method) on a union of segments."""
    segs = sorted(segments, key=lambda sg: sg.lo)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        done = np.zeros(x.shape, dtype=bool)
        for sg in segs:
            m = ~done & (x >= sg.lo) & (x <= sg.hi)
            if np.any(m):
                out[m] = getattr(sg, attr)(x[m])
                done |= m
        if not np.all(done):
            raise DomainError("point outside the trace's dense range")
        return out

    return f


def _cumulative(segments, x_ref, xs, tol, integrand="dw_dx"):
    """int_{x_ref}^{x} integrand dx for every x in ``xs`` (same side of x_ref)."""
    xs = np.asarray(xs, dtype=float)
    breaks = [sg.breaks for sg in segments] + [[sg.lo, sg.hi] for sg in segments]
    lo, hi = min(x_ref, xs.min()), max(x_ref, xs.max())
    nodes = np.unique(np.concatenate([np.concatenate(breaks), xs, [x_ref]]))
    nodes = nodes[(nodes >= lo) & (nodes <= hi)]
    f = _side_function(segments, integrand)
    pieces, err = _panel_integrals(f, nodes, tol.quad * 1e-3)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    at_ref = cum[np.searchsorted(nodes, x_ref)]
    return cum[np.searchsorted(nodes, xs)] - at_ref, err


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """A wave profile u(z), sampled with u(0) = 1/2.

    Attributes
    ----------
    c : float
    z_star : float
        Front position (finite, negative) or -inf for non-saturated waves.
    z, u, one_minus_u : ndarray
        Samples, z strictly increasing, u strictly decreasing.
    kind : WaveKind or None
    right_rate, left_rate : float
        Exponential rates used to extrapolate beyond the samples.
    """

    c: float
    z_star: float
    z: np.ndarray
    u: np.ndarray
    one_minus_u: np.ndarray
    kind: WaveKind | None
    right_rate: float
    left_rate: float
    quad_error: float
    trace: object = field(repr=False, default=None)
    sides: dict = field(repr=False, default_factory=dict)

    @property
    def saturated(self):
        return math.isfinite(self.z_star)

    @property
    def samples(self):
        return np.column_stack([self.z, self.u])

    def w_at(self, r):
        """z = w(r) at arbitrary radii (cubic Hermite in the chart variable)."""
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, np.nan)
        zero = r <= 0.5
        if np.any(zero):
            out[zero] = self.sides["zero"](np.log(r[zero]))
        if np.any(~zero):
            out[~zero] = self.sides["one"](-np.log1p(-r[~zero]))
        return out

    def to_columns(self):
        return {"z": self.z, "u": self.u}


def _side_grid(trace, side, tol):
    """Chart abscissae for the w table of one side."""
    if side == "zero":
        rs = trace.r[trace.r <= 0.5]
        xs = np.log(rs)
        return np.unique(np.concatenate([xs, [_T_HALF]]))
    ss = trace.s[trace.r >= 0.5]
    xs = -np.log(ss)
    smax = trace.sigma_max
    if smax is not None and smax > xs.max() + 1.0:
        xs = np.concatenate([xs, np.arange(math.ceil(xs.max()), smax, 0.25), [smax]])
    return np.unique(np.concatenate([xs, [_LOG2]]))


def _one_side_tail(trace, tol):
    """(saturated?, q at the end) from the state at the largest sigma."""
    segs = trace.one_segments
    x_end = max(sg.hi for sg in segs)
    sg = max(segs, key=lambda s: s.hi)
    r = -math.expm1(-x_end)
    s = math.exp(-x_end)
    g = float(sg.sqrt_h(x_end))
    q = g / (r * s)
    c = trace.c
    if x_end >= tol.sigma_deep - 1e-9 or q > _SAT_Q / c:
        return True, q, x_end, g
    if q < _NS_Q / c:
        return False, q, x_end, g
    raise EstimationError(
        f"cannot decide finiteness of z*: sqrt(h)/(r(1-r)) = {q:.4g} at 1-r = {s:.3g}")


def reconstruct(trace, tol=DEFAULT_TOL, kind=None):
    """Build the wave profile of a positive trace with h(0) = 0.

    w is integrated in t = log r on the zero side (integrand 1/k) and in
    sigma = -log(1-r) on the one side (integrand (1-r)/sqrt(h)), with
    Gauss-Legendre panels on the solver steps.  z* is w at the deepest
    sigma plus the analytic tail of the saturated model.
    """
    if trace.neg_range is not None or not trace.positive:
        raise DomainError("trace is not positive on (0,1); it does not produce a wave")
    if trace.r[0] > tol.delta * (1 + 1e-9) or trace.s[-1] > tol.delta * (1 + 1e-9):
        raise DomainError("trace does not cover [delta, 1-delta]")
    if not trace.zero_segments or not trace.one_segments:
        raise DomainError("trace lacks dense output on one side of r=1/2")
    c = trace.c
    if c >= 2.0 and trace.alpha is not None:
        fate = zero_fate(c, 0.5, trace.alpha, tol)
        if fate.kind == "positive":
            raise DomainError("trace has h(0) > 0; it does not produce a wave")
    saturated, q_end, x_end, g_end = _one_side_tail(trace, tol)

    xz = _side_grid(trace, "zero", tol)
    wz, ez = _cumulative(trace.zero_segments, _T_HALF, xz, tol)
    xo = _side_grid(trace, "one", tol)
    wo, eo = _cumulative(trace.one_segments, _LOG2, xo, tol)
    dz = _side_function(trace.zero_segments, "dw_dx")(xz)
    do = _side_function(trace.one_segments, "dw_dx")(xo)
    sides = {
        "zero": CubicHermiteSpline(xz, wz, dz),
        "one": CubicHermiteSpline(xo, wo, do),
    }
    if saturated:
        if x_end >= tol.sigma_deep - 1e-9:
            tail = math.exp(-x_end) / (c * x_end)
        else:
            a = g_end / c - x_end  # g ~ c (sigma + a) beyond the cutoff
            tail = math.exp(a) * exp1(x_end + a) / c
        z_star = float(wo[-1] - tail)
    else:
        z_star = -math.inf

    r = trace.r
    s = trace.s
    w = np.empty_like(r)
    mz = r <= 0.5
    w[mz] = sides["zero"](np.log(r[mz]))
    w[~mz] = sides["one"](-np.log(s[~mz]))
    z = w[::-1].copy()
    u = r[::-1].copy()
    om = s[::-1].copy()
    if not np.all(np.diff(z) > 0):
        raise IntegrationError("reconstructed z is not strictly increasing")
    if saturated and not z_star < z[0]:
        raise IntegrationError(f"z*={z_star!r} is not left of the first sample {z[0]!r}")
    # extrapolation rates from the outermost samples
    nr = min(20, z.size // 4)
    right = -np.polyfit(z[-nr:], np.log(u[-nr:]), 1)[0]
    left = np.polyfit(z[:nr], np.log(om[:nr]), 1)[0] if not saturated else math.inf
    return WaveProfile(c, z_star, z, u, om, kind, float(right), float(left),
                       float(max(ez, eo)), trace, sides)


def evaluate_u(profile, z, return_flags=False):
    """u(z) by monotone cubic interpolation of the samples.

    Returns 1 for z <= z* (saturated), and beyond the samples uses the
    fitted exponential tails; ``return_flags`` adds a boolean array that
    marks extrapolated values.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    zs, us = profile.z, profile.u
    out = np.empty_like(z)
    flag = np.zeros(z.shape, dtype=bool)
    inside = (z >= zs[0]) & (z <= zs[-1])
    out[inside] = PchipInterpolator(zs, us)(z[inside])
    right = z > zs[-1]
    out[right] = us[-1] * np.exp(-profile.right_rate * (z[right] - zs[-1]))
    flag[right] = True
    left = z < zs[0]
    if profile.saturated:
        sat = left & (z <= profile.z_star)
        out[sat] = 1.0
        gap = left & ~sat
        # between z* and the first sample: 1 - u ~ -c (z - z*) log(z - z*)
        d = z[gap] - profile.z_star
        d0 = zs[0] - profile.z_star
        scale = profile.one_minus_u[0] / (-d0 * math.log(d0))
        out[gap] = 1.0 - scale * (-d * np.log(d))
        flag[gap] = True
    else:
        out[left] = 1.0 - profile.one_minus_u[0] * np.exp(profile.left_rate * (z[left] - zs[0]))
        flag[left] = True
    out = np.clip(out, 0.0, 1.0)
    if scalar:
        return (float(out[0]), bool(flag[0])) if return_flags else float(out[0])
    return (out, flag) if return_flags else out


@dataclass(frozen=True)
class RateFit:
    rate: float
    n: int
    residual_rms: float
    window: tuple


def _rate_fit(x, y, window):
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / x.size)) if res.size else 0.0
    return coef[0], rms


def right_tail_fit(profile, tol=DEFAULT_TOL):
    a, b = tol.fit_window
    m = (profile.u >= a) & (profile.u <= b)
    if m.sum() < 5:
        raise EstimationError(f"only {int(m.sum())} samples with u in {tol.fit_window}")
    slope, rms = _rate_fit(profile.z[m], np.log(profile.u[m]), (a, b))
    return RateFit(float(-slope), int(m.sum()), rms, (a, b))


def right_tail_rate(profile, tol=DEFAULT_TOL):
    """Decay rate of u at +inf: -slope of log u vs z for u in the fit window."""
    return right_tail_fit(profile, tol).rate


@dataclass(frozen=True)
class LeftTail:
    """Left-tail result.

    kind "rate": value is the slope of log(1-u) vs z (non-saturated).
    kind "sharp_ratio": value is (1-u)/(-c (z-z*) log(z-z*)) at the deepest
    resolved point; ``ratios``/``log10_dz`` cover the last resolved decade.
    """

    kind: str
    value: float
    n: int
    ratios: np.ndarray = field(repr=False, default=None)
    log10_dz: np.ndarray = field(repr=False, default=None)

    @property
    def ratio_range(self):
        if self.ratios is None:
            return None
        return float(np.min(self.ratios)), float(np.max(self.ratios))


def sharp_front_ratio(profile, tol=DEFAULT_TOL, *, n=41, margin=40.0):
    """Ratio (1-u)/(-c D log D), D = z - z*, over the last resolved decade.

    With 1 - u = e^{-sigma} and D = e^{-sigma} E(sigma),
    E = int_0^inf e^{-tau}/sqrt(h)(sigma + tau) dtau, the ratio equals
    1/(c E (sigma - log E)) and is computed without underflow.  "Resolved"
    means sigma <= sigma_max - margin, so the truncated part of E is below
    e^{-margin}.
    """
    if not profile.saturated:
        raise DomainError("sharp-front ratio needs a saturated profile")
    trace = profile.trace
    segs = trace.one_segments
    smax = trace.sigma_max
    s_end = smax - margin
    if s_end < -math.log(tol.delta):
        raise EstimationError("saturated trace not integrated deep enough for the ratio")
    c = trace.c
    sqrt_h = _side_function(segs, "sqrt_h")

    def E(sig):
        return _panel_integrals(
            lambda x: np.exp(-(x - sig)) / sqrt_h(x),
            np.unique(np.concatenate([[sig], np.arange(math.ceil(sig), smax, 0.5), [smax]])),
            tol.quad * 1e-3)[0].sum()

    def log10_d(sig):
        return (-sig + math.log(E(sig))) / math.log(10.0)

    l_end = log10_d(s_end)
    # log10 D decreases at about 1/ln 10 per unit sigma; bracket the start of the decade
    lo = s_end - math.log(10.0)
    while log10_d(lo) < l_end + 1.0:
        lo -= 0.5
        if lo < -math.log(tol.delta):
            raise EstimationError("saturated trace does not resolve a full decade of z - z*")
    s_start = brentq(lambda x: log10_d(x) - l_end - 1.0, lo, s_end, xtol=1e-12)
    sig = np.linspace(s_start, s_end, n)
    es = np.array([E(x) for x in sig])
    ratios = 1.0 / (c * es * (sig - np.log(es)))
    ld = (-sig + np.log(es)) / math.log(10.0)
    return ratios, ld


def left_tail(profile, tol=DEFAULT_TOL):
    """Behaviour of 1 - u as u -> 1."""
    if profile.saturated:
        ratios, ld = sharp_front_ratio(profile, tol)
        return LeftTail("sharp_ratio", float(ratios[-1]), int(ratios.size), ratios, ld)
    a, b = tol.fit_window
    m = (profile.one_minus_u >= a) & (profile.one_minus_u <= b)
    if m.sum() < 5:
        raise EstimationError(f"only {int(m.sum())} samples with 1-u in {tol.fit_window}")
    slope, rms = _rate_fit(profile.z[m], np.log(profile.one_minus_u[m]), (a, b))
    return LeftTail("rate", float(slope), int(m.sum()))


def classical_left_rate(c):
    """Left decay rate (-c + sqrt(c**2 + 4))/2 of the classical KPP wave."""
    return 0.5 * (-c + math.sqrt(c * c + 4.0))


def speed_identity(trace, tol=DEFAULT_TOL):
    """int_0^1 (sqrt(h) + r(1-r)/sqrt(h)) dr, which equals c for waves.

    Integrated in log r on the zero side and in -log(1-r) on the one side,
    with the end pieces from the local models sqrt(h) ~ mu r near 0 and
    the state at the cutoff near 1.
    """
    if trace.neg_range is not None or not trace.positive:
        raise IntegrationError("speed identity diverges: trace is not positive")
    zs, os_ = trace.zero_segments, trace.one_segments
    if not zs or not os_:
        raise DomainError("trace lacks dense output on one side of r=1/2")
    sq_z = _side_function(zs, "sqrt_h")
    sq_o = _side_function(os_, "sqrt_h")

    def fz(t):
        r = np.exp(t)
        g = sq_z(t)
        return (g + r * (-np.expm1(t)) / g) * r

    def fo(x):
        s = np.exp(-x)
        g = sq_o(x)
        return (g + (-np.expm1(-x)) * s / g) * s

    t_lo = min(sg.lo for sg in zs)
    x_hi = max(sg.hi for sg in os_)
    nz = np.unique(np.concatenate([sg.breaks for sg in zs] + [[t_lo, _T_HALF]]))
    nz = nz[(nz >= t_lo) & (nz <= _T_HALF)]
    no = np.unique(np.concatenate([sg.breaks for sg in os_] + [[_LOG2, x_hi]]))
    no = no[(no >= _LOG2) & (no <= x_hi)]
    iz, ez = _panel_integrals(fz, nz, tol.quad * 1e-3)
    io, eo = _panel_integrals(fo, no, tol.quad * 1e-3)
    r_lo = math.exp(t_lo)
    mu = float(sq_z(np.array([t_lo]))[0]) / r_lo
    head = r_lo / mu + mu * r_lo**2 / 2.0
    s_hi = math.exp(-x_hi)
    g_hi = float(sq_o(np.array([x_hi]))[0])
    tail = s_hi * (g_hi + (1.0 - s_hi) * s_hi / g_hi)
    return float(iz.sum() + io.sum() + head + tail)


def _expected_pattern(kind):
    return {
        WaveKind.NON_SATURATED: "one inflection z0 > 0",
        WaveKind.SATURATED_A: "two inflections z1 < 0 < z2",
        WaveKind.SATURATED_B: "single tangency at z = 0",
        WaveKind.SATURATED_C: "no inflection",
    }[kind]


def convexity_pattern(trace, kind=None, tol=DEFAULT_TOL, profile=None):
    """Inflection points z = w(r) of the wave, r running over critical radii of h.

    With ``kind`` given the pattern is checked against the class:
    NonSaturated one z0 > 0; SaturatedA z1 < 0 < z2; SaturatedB [0.0];
    SaturatedC none.
    """
    if kind is not None:
        kind = WaveKind(kind)
        if not kind.is_wave:
            raise DomainError(f"{kind} does not produce a wave")
    radii = np.array(trace.critical_radii())
    if kind == WaveKind.SATURATED_B:
        slope = abs(rhs(0.5, trace.evaluate(0.5), trace.c))
        others = radii[np.abs(radii - 0.5) > 1e-9] if radii.size else radii
        if slope > 10 * tol.ode_abs or others.size:
            raise ConsistencyError(f"no single tangency at r=1/2 (|h'(1/2)|={slope:.3g})")
        return [0.0]
    if radii.size:
        if profile is None:
            profile = reconstruct(trace, tol, kind)
        zs = sorted(float(z) for z in profile.w_at(radii))
    else:
        zs = []
    if kind is None:
        return zs
    ok = {
        WaveKind.NON_SATURATED: len(zs) == 1 and zs[0] > 0,
        WaveKind.SATURATED_A: len(zs) == 2 and zs[0] < 0 < zs[1],
        WaveKind.SATURATED_C: len(zs) == 0,
    }[kind]
    if not ok:
        raise ConsistencyError(f"{kind}: expected {_expected_pattern(kind)}, got {zs}")
    return zs


def round_trip_h(profile, r_range=(0.05, 0.95), width=11):
    """Recompute h = (u')**2 o u^{-1} from the samples by finite differences.

    Returns (r, h_tilde) on the interior samples with u in ``r_range``.
    """
    z, u = profile.z, profile.u
    d1 = fd_weights_grid(z, u, 1, width)
    m = (u >= r_range[0]) & (u <= r_range[1])
    return u[m], d1[m] ** 2


def profile_crossings(profiles, z_grid=None, *, z_tol=1e-6):
    """Sign changes of u_i - u_j on a common grid, for every pair.

    Returns {(i, j): [z, ...]} with the midpoints of the grid cells where
    the difference changes sign; points where both profiles equal 1 (or
    differ by less than ``z_tol``) are skipped.  u(0) = 1/2 for all
    profiles, so a crossing at z = 0 is always present.
    """
    if z_grid is None:
        lo = max(max(p.z_star, p.z[0]) if p.saturated else p.z[0] for p in profiles)
        hi = min(p.z[-1] for p in profiles)
        z_grid = np.linspace(max(lo, -20.0), min(hi, 20.0), 4001)
    z = np.asarray(z_grid, dtype=float)
    us = [evaluate_u(p, z) for p in profiles]
    out = {}
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            d = us[i] - us[j]
            keep = np.abs(d) > z_tol
            zk, dk = z[keep], d[keep]
            flips = np.flatnonzero(np.sign(dk[1:]) != np.sign(dk[:-1]))
            out[(i, j)] = [float(0.5 * (zk[k] + zk[k + 1])) for k in flips]
    return out
