"""Distinguished solutions, shooting thresholds and wave classification.

For c >= 2 the shooting value alpha = h(1/2) organizes all waves:

* h0, the unique solution vanishing at both ends (non-saturated wave);
* alpha in (h0(1/2), alpha_max]: saturated waves, split by the bell top
  1/(16 c**2) into types A, B, C;
* alpha_max = sup{alpha : h(0) = 0}, attained by the largest solution H;
* alpha_switch-/+: where the behaviour at r = 0 switches between
  lambda- and lambda+.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ._panels import ChebPanels
from .exceptions import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    EstimationError,
    IntegrationError,
    SearchError,
)
from .ode_core import (
    DEFAULT_TOL,
    TOWARD_ONE,
    TOWARD_ZERO,
    HTrace,
    Segment,
    Speed,
    _assemble,
    _f_g,
    integrate,
    log_square_bound,
    rhs,
    shoot,
    zero_fate,
)
from .validation import check_array_1d, check_real, check_speed

_LOG2 = math.log(2.0)
GAP_SPEED_LIMIT = 3.0 * math.sqrt(2.0) / 2.0


class WaveKind(str, enum.Enum):
    BELOW_SMALL = "BelowSmall"
    NON_SATURATED = "NonSaturated"
    SATURATED_A = "SaturatedA"
    SATURATED_B = "SaturatedB"
    SATURATED_C = "SaturatedC"
    ABOVE_MAX = "AboveMax"

    @property
    def is_wave(self):
        return self not in (WaveKind.BELOW_SMALL, WaveKind.ABOVE_MAX)

    @property
    def saturated(self):
        return self in (WaveKind.SATURATED_A, WaveKind.SATURATED_B, WaveKind.SATURATED_C)

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Threshold:
    """A bisection result with its certificate pair.

    ``alpha_in`` is the last probe satisfying the predicate and
    ``alpha_out`` the first probe violating it.
    """

    value: float
    alpha_in: float
    alpha_out: float
    probes: int
    undecided: int = 0

    def __float__(self):
        return float(self.value)

    @property
    def width(self):
        return self.alpha_out - self.alpha_in


@dataclass(frozen=True)
class ThresholdTable:
    c: float
    h0_half: float
    bell_top: float
    plus_bell_top: float
    H_half: float
    alpha_switch_minus: float
    alpha_switch_plus: float
    alpha_max: float
    tol: object = field(repr=False, default=DEFAULT_TOL)
    certificates: dict = field(repr=False, default_factory=dict)

    def chain(self):
        """The ordered values that the threshold chain compares."""
        return [
            ("h0_half", self.h0_half),
            ("bell_top", self.bell_top),
            ("plus_bell_top", self.plus_bell_top),
            ("alpha_switch_minus", self.alpha_switch_minus),
            ("alpha_switch_plus", self.alpha_switch_plus),
            ("alpha_max", self.alpha_max),
        ]

    def chain_failures(self):
        """Violations of the chain (strict, strict, strict, <=, <=; H <= alpha_max)."""
        b = self.tol.bisect
        out = []
        pairs = self.chain()
        for i, ((na, a), (nb, bv)) in enumerate(zip(pairs, pairs[1:])):
            slack = b * max(abs(a), abs(bv))
            if i < 3 and not a < bv:
                out.append(f"{na} < {nb} fails: {a!r} >= {bv!r}")
            if i >= 3 and not a <= bv + slack:
                out.append(f"{na} <= {nb} fails: {a!r} > {bv!r}")
        if not self.H_half <= self.alpha_max * (1 + 10 * b):
            out.append(f"H_half <= alpha_max fails: {self.H_half!r} > {self.alpha_max!r}")
        return out

    def as_dict(self):
        return {
            "c": self.c,
            "h0_half": self.h0_half,
            "bell_top": self.bell_top,
            "plus_bell_top": self.plus_bell_top,
            "H_half": self.H_half,
            "alpha_switch_minus": self.alpha_switch_minus,
            "alpha_switch_plus": self.alpha_switch_plus,
            "alpha_max": self.alpha_max,
            "certificates": {k: list(v) for k, v in self.certificates.items()},
        }


@dataclass(frozen=True)
class WaveClass:
    tag: WaveKind
    inflection_radii: tuple
    tail_exponent_estimate: float | None
    ambiguous: bool = False
    alpha: float | None = None
    trace: HTrace | None = field(default=None, repr=False)
    notes: tuple = ()


@dataclass(frozen=True)
class DecayFit:
    """Limit of q(r) = sqrt(h)/(r (1 - r)) as r -> 0.

    mu is q at the smallest r of the window; intercept is the value at
    r = 0 of the least-squares line through q(r); eps_fit bounds the
    distance between the two plus the fit residual.
    """

    mu: float
    intercept: float
    eps_fit: float
    side: str
    nearest: str | None
    increasing: bool
    residual_rms: float
    r: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class IterationDiagnostics:
    n_iter: int
    sup_diffs: tuple
    weighted_diffs: tuple
    kappa: float
    min_increment: float
    bound_excess: float
    h_half: float
    weighted_floor: float = 0.0

    @property
    def weighted_decreasing(self):
        """Strict decrease of the weighted differences above the rounding floor."""
        w = self.weighted_diffs
        return all(b < a for a, b in zip(w, w[1:]) if a > self.weighted_floor)


@dataclass(frozen=True)
class SmallSpeedReport:
    c: float
    entries: tuple
    certified: bool
    anomalies: tuple


# ---------------------------------------------------------------------------
# the small solution h0


def _h_half_from_zero(c, s_n, tol):
    """h(1/2) of the backward trace started at h(1 - s_n) = 0."""
    f, jac = _f_g(c)
    d = 1e-3 * s_n
    x0 = -math.log(s_n) - d
    g0 = math.sqrt(2.0 * (1.0 - s_n) * s_n * d)
    sol = solve_ivp(f, (x0, _LOG2), [g0], method="LSODA", jac=jac, rtol=tol.ode_rel,
                    atol=tol.ode_abs * 1e-10)
    if sol.status < 0:
        raise IntegrationError(f"h0 sequence step failed: {sol.message}",
                               state=(float(sol.t[-1]), float(sol.y[0, -1])))
    return float(sol.y[0, -1]) ** 2


@functools.lru_cache(maxsize=32)
def solve_small(c, tol=DEFAULT_TOL, *, k_start=4, k_max=40, samples=800):
    """The small solution h0 (non-saturated wave).

    h0(1/2) is the increasing limit of h_k(1/2), where h_k solves the
    equation backward from h_k(1 - 2**-k) = 0.  The iteration stops when
    successive values differ by less than ``bisect`` (relative).  The
    returned trace is integrated from r = 1 - delta/2, seeded on the local
    model sqrt(h) = r s (1/c - s/c**3) of h0 near r = 1, and is checked
    against the limit at r = 1/2.
    """
    c = check_speed(c, minimum=2.0)
    seq = []
    for k in range(k_start, k_max + 1):
        seq.append(_h_half_from_zero(c, 2.0**-k, tol))
        if len(seq) >= 2 and abs(seq[-1] - seq[-2]) < tol.bisect * seq[-1]:
            break
    else:
        raise ConvergenceError("h0 sequence did not converge", {"sequence": seq})
    aitken = None
    if len(seq) >= 3:
        a, b, d = seq[-3:]
        den = d - 2 * b + a
        aitken = d - (d - b) ** 2 / den if den != 0 else d
    limit = seq[-1]
    s_n = 0.5 * tol.delta
    q = 1.0 / c - s_n / c**3
    g = (1.0 - s_n) * s_n * q
    tr = integrate(c, (1.0 - s_n, g * g), TOWARD_ZERO, tol, samples=samples)
    a_half = tr.alpha
    if abs(a_half - limit) > max(10 * tol.bisect * limit, 1e3 * tol.ode_rel * limit):
        raise ConvergenceError(
            "seeded h0 trace disagrees with the r_n limit at r=1/2",
            {"sequence": seq, "trace_half": a_half},
        )
    meta = dict(tr.meta)
    meta.update(sequence=tuple(seq), aitken=aitken, limit=limit, kind="h0")
    object.__setattr__(tr, "meta", meta)
    return tr


# ---------------------------------------------------------------------------
# the large solution H


def _frozen_root(c, delta):
    ce = c / (1.0 - delta)
    return 0.5 * (ce + math.sqrt(max(ce * ce - 4.0, 0.0)))


@functools.lru_cache(maxsize=32)
def solve_large(c, tol=DEFAULT_TOL, *, r_seed=1e-14, samples=800):
    """H by forward integration from r_seed on the lambda+ branch.

    Near r = 0 the k chart has lambda+ as a saddle which attracts in the
    forward direction; seeding at the larger root of the quadratic with
    c frozen at c/(1 - r_seed) lands on H up to a transient that decays
    like a power of r_seed.
    """
    c = check_speed(c, minimum=2.0)
    k0 = _frozen_root(c, r_seed)
    tr = integrate(c, (r_seed, (k0 * r_seed) ** 2), TOWARD_ONE, tol, samples=samples)
    meta = dict(tr.meta)
    meta.update(kind="H", r_seed=r_seed)
    object.__setattr__(tr, "meta", meta)
    return tr


def _weight_exponent(c, lp, r, s):
    """Lambda(r) with Lambda' = c / (lambda+ r (1-r)**2), Lambda(1/2) = 0."""
    return (c / lp) * (np.log(r) - np.log(s) + 1.0 / s - 2.0)


def solve_large_iteration(c, tol=DEFAULT_TOL, *, n_panels=40, order=16, r_min=1e-12,
                          max_iter=500, samples=800):
    """H as the limit of h_{n+1} = 2c int_0^r sqrt(h_n+)/(1-s) ds - r**2.

    The iteration starts from (lambda+)**2 r**2 (1-r)**2 and runs on two
    piecewise-Chebyshev grids: log r in [log r_min, log 1/2] and
    -log(1-r) in [log 2, -log delta].  Each step integrates spectrally.

    Returns
    -------
    trace : HTrace
        The fixed point on the grid (dense via the panel interpolants).
    diag : IterationDiagnostics
        Sup norms of successive differences, plain and in the weight
        exp(-kappa Lambda(r)) where the map contracts by 1/kappa.
    """
    c = check_speed(c, minimum=2.0)
    spd = Speed.from_c(c)
    lp = spd.lambda_plus
    zp = ChebPanels(np.linspace(math.log(r_min), -_LOG2, n_panels + 1), order)
    op = ChebPanels(np.linspace(_LOG2, -math.log(tol.delta), n_panels + 1), order)
    rz, sz = np.exp(zp.nodes), -np.expm1(zp.nodes)
    ro, so = -np.expm1(-op.nodes), np.exp(-op.nodes)
    hz = (lp * rz * sz) ** 2
    ho = (lp * ro * so) ** 2
    bound_z = log_square_bound(c, rz, sz)
    bound_o = log_square_bound(c, ro, so)
    kappa = min(2.0, 2.7 * lp / c)
    wz = np.exp(-kappa * _weight_exponent(c, lp, rz, sz))
    with np.errstate(over="ignore"):
        wo = np.exp(-kappa * _weight_exponent(c, lp, ro, so))
    sup_d, w_d = [], []
    min_inc = math.inf
    excess = -math.inf
    h_half = math.nan
    for it in range(1, max_iter + 1):
        gz = np.sqrt(np.maximum(hz, 0.0))
        go = np.sqrt(np.maximum(ho, 0.0))
        iz, iz_tot = zp.cumulative(gz * rz / sz)
        head = (gz[0, 0] / rz[0, 0]) * r_min**2 / 2.0
        iz = iz + head
        iz_tot += head
        io, _ = op.cumulative(go)
        io = io + iz_tot
        nz = 2.0 * c * iz - rz**2
        no = 2.0 * c * io - ro**2
        dz, do = nz - hz, no - ho
        sup_d.append(float(max(np.max(np.abs(dz)), np.max(np.abs(do)))))
        w_d.append(float(max(np.max(np.abs(dz) * wz), np.max(np.abs(do) * wo))))
        min_inc = min(min_inc, float(min(dz.min(), do.min())))
        excess = max(excess, float(max((nz - bound_z).max(), (no - bound_o).max())))
        hz, ho = nz, no
        h_half = 2.0 * c * iz_tot - 0.25
        if excess > tol.quad:
            raise ConsistencyError(
                f"iterate exceeds c^2 log^2(1-r) by {excess:.3g} at iteration {it}")
        if sup_d[-1] <= max(tol.quad * 1e-3, 64 * np.finfo(float).eps * np.max(np.abs(ho))):
            break
    else:
        raise ConvergenceError("monotone iteration did not converge",
                               {"sup_diffs": sup_d[-5:]})
    # rounding of h in the weighted norm: eps |h| w, largest near r_min
    floor = 64 * np.finfo(float).eps * float(max(np.max(np.abs(hz) * wz), np.max(np.abs(ho) * wo)))
    diag = IterationDiagnostics(it, tuple(sup_d), tuple(w_d), kappa, min_inc, excess, h_half, floor)
    seg_z = Segment("ht", zp.lo, zp.hi, zp.interpolant(hz), zp.edges)
    seg_o = Segment("hs", op.lo, op.hi, op.interpolant(ho), op.edges)
    tr = _assemble(c, h_half, (seg_z, seg_o), (), tol, r_range=(r_min, 1.0 - tol.delta),
                   s_range=(tol.delta, 1.0 - r_min), samples=samples,
                   meta={"kind": "H-iteration", "n_iter": it})
    return tr, diag


# ---------------------------------------------------------------------------
# thresholds


def _bisect(pred, lo, hi, tol_rel, *, name):
    """Bisection for sup{alpha : pred(alpha)} with pred(lo) True, pred(hi) False."""
    p_lo, u_lo = pred(lo)
    p_hi, u_hi = pred(hi)
    if not p_lo or p_hi:
        raise SearchError(f"{name}: bracket [{lo!r}, {hi!r}] has no sign change "
                          f"(pred(lo)={p_lo}, pred(hi)={p_hi})")
    n, und = 2, int(u_lo) + int(u_hi)
    while hi - lo > tol_rel * hi:
        mid = 0.5 * (lo + hi)
        p, u = pred(mid)
        n += 1
        und += int(u)
        if p:
            lo = mid
        else:
            hi = mid
    return Threshold(0.5 * (lo + hi), lo, hi, n, und)


def _probe_fate(c, tol, want_touch=False):
    def fate(alpha):
        return zero_fate(c, 0.5, alpha, tol, want_touch=want_touch)
    return fate


def alpha_max(c, tol=DEFAULT_TOL):
    """sup{alpha : the backward trace from (1/2, alpha) has h(0) = 0}.

    Bracket [(lambda+)**2/16, c**2 log(2)**2]; probes that reach neither
    certificate before t_deep count as not certified (they are reported in
    ``undecided``).
    """
    c = check_speed(c, minimum=2.0)
    spd = Speed.from_c(c)
    fate = _probe_fate(c, tol)

    def pred(a):
        f = fate(a)
        return f.kind == "zero", f.kind == "undecided"

    return _bisect(pred, spd.plus_bell_top, (c * _LOG2) ** 2, tol.bisect, name="alpha_max")


def alpha_switch(c, tol=DEFAULT_TOL, *, check=True):
    """(alpha_switch-, alpha_switch+): sup of alpha whose trace meets the
    lambda-/lambda+ bell on (0, 1/2]."""
    c = check_speed(c, minimum=2.0)
    spd = Speed.from_c(c)
    fate = functools.lru_cache(maxsize=None)(_probe_fate(c, tol, want_touch=True))
    lo, hi = spd.plus_bell_top, (c * _LOG2) ** 2

    def pred_m(a):
        f = fate(a)
        return f.touches_minus, f.kind == "undecided"

    def pred_p(a):
        f = fate(a)
        return f.touches_plus, f.kind == "undecided"

    tm = _bisect(pred_m, lo, hi, tol.bisect, name="alpha_switch-")
    tp = _bisect(pred_p, lo, hi, tol.bisect, name="alpha_switch+")
    if check:
        if not tm.value > spd.plus_bell_top:
            raise ConsistencyError(f"alpha_switch- = {tm.value!r} <= (lambda+)^2/16")
        if 2.0 < c < GAP_SPEED_LIMIT and not tm.alpha_out < tp.alpha_in:
            raise ConsistencyError(
                f"no gap alpha_switch- < alpha_switch+ at c={c}: {tm.value!r}, {tp.value!r}")
    return tm, tp


@functools.lru_cache(maxsize=32)
def _table_parts(c, tol):
    h0 = solve_small(c, tol)
    _, diag = solve_large_iteration(c, tol)
    am = alpha_max(c, tol)
    tm, tp = alpha_switch(c, tol)
    return float(h0.alpha), float(diag.h_half), am, tm, tp


def threshold_table(c, tol=DEFAULT_TOL):
    """Compute (and cache) the full threshold table for a speed c >= 2."""
    c = check_speed(c, minimum=2.0)
    spd = Speed.from_c(c)
    h0_half, H_half, am, tm, tp = _table_parts(c, tol)
    certs = {
        "alpha_max": (am.alpha_in, am.alpha_out),
        "alpha_switch_minus": (tm.alpha_in, tm.alpha_out),
        "alpha_switch_plus": (tp.alpha_in, tp.alpha_out),
    }
    return ThresholdTable(c, h0_half, spd.bell_top, spd.plus_bell_top, H_half, tm.value,
                          tp.value, am.value, tol, certs)


# ---------------------------------------------------------------------------
# classification


def _band(value, tol):
    return 10.0 * tol.bisect * abs(value)


def classify(c, alpha, table=None, tol=DEFAULT_TOL, *, samples=800):
    """Classify the shooting value ``alpha`` at speed ``c``.

    The trace through (1/2, alpha) is integrated in both directions; its
    fate at 0, sign near 1 and bell crossings give the tag, which is then
    checked against the threshold table.  Values within the bisect band of
    a threshold are tagged by the trace and flagged ``ambiguous``.
    """
    c = check_speed(c, minimum=2.0)
    alpha = check_real(alpha, "alpha", lo=0.0)
    table = threshold_table(c, tol) if table is None else table
    if table.c != c:
        raise DomainError(f"table is for c={table.c}, not {c}")
    notes = []
    if abs(alpha - table.h0_half) <= _band(table.h0_half, tol):
        tr = solve_small(c, tol, samples=samples)
        return WaveClass(WaveKind.NON_SATURATED, tr.critical_radii(),
                         decay_exponent(tr, tol).mu, False, alpha, tr)
    if alpha > (c * _LOG2) ** 2:
        # above the log-square bound at 1/2: h(0) > 0 necessarily
        return WaveClass(WaveKind.ABOVE_MAX, (), None, False, alpha, None,
                         ("alpha exceeds c^2 log^2 2",))
    fate = zero_fate(c, 0.5, alpha, tol)
    near = [name for name, v in (("alpha_max", table.alpha_max), ("bell_top", table.bell_top),
                                 ("h0_half", table.h0_half))
            if abs(alpha - v) <= _band(v, tol)]
    if fate.kind != "zero":
        amb = bool(near) or fate.kind == "undecided"
        if fate.kind == "undecided":
            notes.append("fate at r=0 undecided before t_deep")
        return WaveClass(WaveKind.ABOVE_MAX, (), None, amb, alpha, None, tuple(notes))
    tr = shoot(c, alpha, tol, samples=samples)
    if tr.crosses_zero:
        tag = WaveKind.BELOW_SMALL
        expected = alpha < table.h0_half
        radii = tr.critical_radii()
        mu = None
    else:
        radii = tuple(r for r in tr.critical_radii() if abs(r - 0.5) > 1e-9)
        slope = abs(rhs(0.5, alpha, c))
        tangent = abs(alpha - table.bell_top) <= tol.bisect * table.bell_top
        if tangent and slope < 10 * tol.ode_abs:
            tag, radii = WaveKind.SATURATED_B, (0.5,)
            expected = True
        elif tangent:
            notes.append(f"within the bell-top band but h'(1/2)={slope:.3g}")
            near.append("bell_top")
            tag = WaveKind.SATURATED_A if len(radii) == 2 else WaveKind.SATURATED_C
            expected = True
        elif len(radii) == 2 and radii[0] < 0.5 < radii[1]:
            tag = WaveKind.SATURATED_A
            expected = table.h0_half < alpha < table.bell_top
        elif not radii:
            tag = WaveKind.SATURATED_C
            expected = table.bell_top < alpha <= table.alpha_max * (1 + tol.bisect)
        else:
            raise ConsistencyError(f"unexpected critical radii {radii} for alpha={alpha!r}")
        mu = decay_exponent(tr, tol).mu
    own = {WaveKind.SATURATED_B: "bell_top", WaveKind.SATURATED_C: "alpha_max"}.get(tag)
    near = [n for n in near if n != own]
    if not expected:
        if not near:
            raise ConsistencyError(f"trace shape ({tag}) contradicts the threshold table "
                                   f"at alpha={alpha!r}")
        notes.append(f"trace shape disagrees with table near {near}")
    return WaveClass(tag, tuple(radii), mu, bool(near), alpha,
                     tr if tag.is_wave else None, tuple(notes))


def small_speed_scan(c, alpha_grid, tol=DEFAULT_TOL):
    """Check that no alpha on the grid gives a nonnegative h with h(0) = 0 (c < 2)."""
    c = check_speed(c)
    if not c < 2.0:
        raise DomainError(f"small_speed_scan requires c < 2, got {c}")
    alphas = check_array_1d(alpha_grid, "alpha_grid")
    entries, anomalies = [], []
    for a in alphas:
        if a < 0:
            raise DomainError(f"alpha must be >= 0, got {a}")
        if a == 0.0:
            entries.append((0.0, "negative_branch", math.nan))
            continue
        f = zero_fate(c, 0.5, float(a), tol)
        outcome = {"positive": "h(0)>0", "undecided": "undecided"}.get(f.kind, "h(0)=0")
        entries.append((float(a), outcome, f.h0_estimate))
        if outcome not in ("h(0)>0",):
            anomalies.append((float(a), outcome))
    return SmallSpeedReport(c, tuple(entries), not anomalies, tuple(anomalies))


def decay_exponent(trace, tol=DEFAULT_TOL, *, n=60):
    """Estimate lim_{r->0} sqrt(h)/(r (1-r)) on the fit window."""
    a, b = tol.fit_window
    if trace.r[0] > a * (1 + 1e-12):
        raise DomainError(f"trace starts at r={trace.r[0]!r}, above the fit window")
    r = np.geomspace(a, b, n)
    h = trace.evaluate(r)
    if np.any(~(h > 0)):
        raise DomainError("trace is not positive on the fit window")
    q = np.sqrt(h) / (r * (1.0 - r))
    coef, res, *_ = np.polyfit(r, q, 1, full=True)
    slope, intercept = coef
    rms = float(np.sqrt(res[0] / n)) if res.size else 0.0
    mu = float(q[0])
    eps_fit = abs(mu - intercept) + rms
    if not np.isfinite(mu) or abs(q[0] - q[n // 3]) > 0.1 * abs(q[0]):
        raise EstimationError("q(r) is not settled on the fit window",
                              residuals=q - np.polyval(coef, r))
    nearest = None
    if trace.c >= 2.0:
        spd = Speed.from_c(trace.c)
        cands = {"lambda_minus": spd.lambda_minus, "lambda_plus": spd.lambda_plus}
        nearest = min(cands, key=lambda k: abs(cands[k] - mu))
        side = "below" if mu < cands[nearest] else "above"
    else:
        side = "none"
    return DecayFit(mu, float(intercept), float(eps_fit), side, nearest,
                    bool(q[-1] > q[0]), rms, r, q)
