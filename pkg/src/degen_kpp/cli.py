"""Command-line interface: degen-kpp {lambda,classify,wave,figure,verify}.

Settings come from (lowest to highest precedence) built-in defaults, a
key=value config file (``--config`` or the ``DEGEN_KPP_CONFIG`` path) and
command-line flags.  Failures print a JSON object with a ``reason`` on
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import DegenKPPError, DomainError
from .ode_core import ToleranceSet, lambda_pm
from .outputs import SCHEMA, line_plot, long_csv, to_csv, to_json

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "c": None,
    "alpha": None,
    "special": None,
    "tol_ode": 1e-12,
    "tol_bisect": 1e-10,
    "samples": 800,
    "out": None,
    "format": "json",
    "which": "all",
    "suite": "all",
    "eps": 0.1,
}
_TYPES = {
    "c": float,
    "alpha": float,
    "special": str,
    "tol_ode": float,
    "tol_bisect": float,
    "samples": int,
    "out": str,
    "format": str,
    "which": str,
    "suite": str,
    "eps": float,
}
_CHOICES = {
    "special": ("small", "large", "max"),
    "format": ("csv", "json", "svg"),
    "which": ("waves", "phase", "phase-log", "all"),
    "suite": ("subsuper", "recursions", "residuals", "focusing", "all"),
}


class CLIFailure(Exception):
    def __init__(self, reason, code, exit_code=EXIT_USAGE, details=None):
        super().__init__(reason)
        self.reason = reason
        self.code = code
        self.exit_code = exit_code
        self.details = details or {}


# ---------------------------------------------------------------------------
# configuration


def read_config(path):
    """Parse a key=value file; '#' starts a comment, keys may use - or _."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CLIFailure(f"{path}:{n}: expected key=value", "config")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise CLIFailure(f"{path}:{n}: unknown key {key!r}", "config")
        out[key] = _convert(key, val)
    return out


def _convert(key, val):
    try:
        v = _TYPES[key](val)
    except ValueError:
        raise CLIFailure(f"bad value for {key}: {val!r}", "config") from None
    if key in _CHOICES and v not in _CHOICES[key]:
        raise CLIFailure(f"{key} must be one of {_CHOICES[key]}, got {v!r}", "config")
    return v


def resolve(args):
    """Merge defaults, the config file and explicit flags into one dict."""
    cfg = dict(DEFAULTS)
    path = args.config or os.environ.get("DEGEN_KPP_CONFIG")
    if path:
        if not Path(path).is_file():
            raise CLIFailure(f"config file not found: {path}", "config")
        cfg.update(read_config(path))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    cfg["command"] = args.command
    if cfg["tol_ode"] <= 0 or cfg["tol_bisect"] <= 0 or cfg["samples"] < 50:
        raise CLIFailure("tolerances must be positive and samples >= 50", "config")
    return cfg


def tolerances(cfg):
    try:
        return ToleranceSet(ode_rel=cfg["tol_ode"], ode_abs=cfg["tol_ode"] * 1e-2,
                            bisect=cfg["tol_bisect"])
    except DomainError as exc:
        raise CLIFailure(str(exc), "config") from None


def _public_config(cfg):
    return {k: cfg[k] for k in ["command", *DEFAULTS]}


def _need_c(cfg):
    if cfg["c"] is None:
        raise CLIFailure("--c is required", "missing_c")
    if not (math.isfinite(cfg["c"]) and cfg["c"] > 0):
        raise CLIFailure(f"c must be positive, got {cfg['c']}", "domain")
    return cfg["c"]


def _need_waves(c):
    if c < 2.0:
        raise CLIFailure("no waves for c<2", "no_waves", details={"c": c})


def _write(text, out, name=None):
    if out is None:
        sys.stdout.write(text)
        return None
    path = Path(out) if name is None else Path(out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# commands


def cmd_lambda(cfg):
    c = _need_c(cfg)
    _need_waves(c)
    lm, lp = lambda_pm(c)
    payload = {"command": "lambda", "status": "ok", "c": c, "lambda_minus": lm, "lambda_plus": lp,
               "bell_half": 1.0 / (16 * c * c), "plus_bell_quarter": lp * lp / 16}
    fmt = cfg["format"]
    if fmt == "svg":
        raise CLIFailure("lambda has no svg output", "format")
    if fmt == "csv":
        keys = ["lambda_minus", "lambda_plus", "bell_half", "plus_bell_quarter"]
        text = to_csv({"name": keys, "value": [payload[k] for k in keys]},
                      _public_config(cfg), __version__)
    else:
        text = to_json(payload, _public_config(cfg), __version__)
    _write(text, cfg["out"])
    return EXIT_OK


def cmd_classify(cfg):
    from .shooting import classify, threshold_table

    c = _need_c(cfg)
    _need_waves(c)
    tol = tolerances(cfg)
    table = threshold_table(c, tol)
    failures = table.chain_failures()
    payload = {"command": "classify", "table": table.as_dict(), "chain_failures": failures}
    if cfg["alpha"] is not None:
        rec = classify(c, cfg["alpha"], table, tol, samples=cfg["samples"])
        payload["alpha"] = cfg["alpha"]
        payload["class"] = str(rec.tag)
        payload["inflection_radii"] = list(rec.inflection_radii)
        payload["ambiguous"] = rec.ambiguous
        payload["notes"] = list(rec.notes)
    payload["status"] = "ok" if not failures else "fail"
    if cfg["format"] == "svg":
        raise CLIFailure("classify has no svg output", "format")
    if cfg["format"] == "csv":
        rows = [(k, v) for k, v in table.chain()] + [("H_half", table.H_half)]
        text = to_csv({"name": [k for k, _ in rows], "value": [v for _, v in rows]},
                      _public_config(cfg), __version__)
    else:
        text = to_json(payload, _public_config(cfg), __version__)
    _write(text, cfg["out"])
    if failures:
        raise CLIFailure("threshold chain violated", "chain", EXIT_CHECK, {"failures": failures})
    return EXIT_OK


def _wave_trace(cfg, tol):
    from .ode_core import shoot
    from .shooting import WaveKind, alpha_max, classify, solve_large, solve_small, threshold_table

    c = cfg["c"]
    n = cfg["samples"]
    special = cfg["special"]
    if special == "small":
        return solve_small(c, tol, samples=n), WaveKind.NON_SATURATED
    if special == "large":
        return solve_large(c, tol, samples=n), WaveKind.SATURATED_C
    if special == "max":
        am = alpha_max(c, tol)
        return shoot(c, am.alpha_in, tol, samples=n), WaveKind.SATURATED_C
    if cfg["alpha"] is None:
        raise CLIFailure("wave needs --alpha or --special", "missing_alpha")
    rec = classify(c, cfg["alpha"], threshold_table(c, tol), tol, samples=n)
    if not rec.tag.is_wave:
        raise CLIFailure("no wave for this alpha", "no_wave",
                         details={"alpha": cfg["alpha"], "class": str(rec.tag)})
    return rec.trace, rec.tag


def wave_report(trace, kind, tol):
    """Profile and JSON-ready report (z*, class, tails, identities, residuals)."""
    from .verify import bump_family, tw_residual, weak_residual
    from .wave import convexity_pattern, left_tail, reconstruct, right_tail_rate, speed_identity

    prof = reconstruct(trace, tol, kind)
    lt = left_tail(prof, tol)
    c = trace.c
    rep = {
        "c": c,
        "alpha": trace.alpha,
        "class": str(kind),
        "z_star": prof.z_star,
        "right_rate": right_tail_rate(prof, tol),
        "left_tail": {"kind": lt.kind, "value": lt.value,
                      "range": list(lt.ratio_range) if lt.ratio_range else None},
        "speed_identity": speed_identity(trace, tol),
        "inflections": convexity_pattern(trace, kind, tol, profile=prof),
        "tw_residual": tw_residual(prof, c),
        "weak_residuals": [weak_residual(prof, c, b) for b in bump_family(prof)],
        "samples": int(prof.z.size),
    }
    return prof, rep


def cmd_wave(cfg):
    c = _need_c(cfg)
    _need_waves(c)
    tol = tolerances(cfg)
    trace, kind = _wave_trace(cfg, tol)
    prof, rep = wave_report(trace, kind, tol)
    conf = _public_config(cfg)
    fmt = cfg["format"]
    payload = {"command": "wave", "status": "ok", **rep}
    if fmt == "csv":
        text = to_csv({"z": prof.z, "u": prof.u}, conf, __version__)
        _write(text, cfg["out"])
        if cfg["out"] is not None:
            _write(to_json(payload, conf, __version__), str(Path(cfg["out"]).with_suffix(".json")))
    elif fmt == "svg":
        zs = prof.z[(prof.z > -15) & (prof.z < 15)]
        curves = [{"label": f"{kind} alpha={trace.alpha:.6g}", "x": zs,
                   "y": prof.u[(prof.z > -15) & (prof.z < 15)]}]
        if prof.saturated:
            curves[0]["x"] = np.concatenate([[-15.0, prof.z_star], curves[0]["x"]])
            curves[0]["y"] = np.concatenate([[1.0, 1.0], curves[0]["y"]])
        _write(line_plot(curves, title=f"wave profile, c={c:g}", xlabel="z", ylabel="u",
                         config=conf, version=__version__), cfg["out"])
    else:
        payload["z"] = prof.z
        payload["u"] = prof.u
        _write(to_json(payload, conf, __version__), cfg["out"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# figures


def figure_traces(c, tol, alphas=None, samples=800):
    """Default four waves: two type (c), one type (a), the non-saturated one."""
    from .ode_core import shoot
    from .shooting import classify, solve_large, solve_small, threshold_table

    table = threshold_table(c, tol)
    out = []
    if alphas:
        # largest alpha first, the order the ordering check expects
        for a in sorted(alphas, reverse=True):
            rec = classify(c, a, table, tol, samples=samples)
            if not rec.tag.is_wave:
                raise CLIFailure("no wave for this alpha", "no_wave",
                                 details={"alpha": a, "class": str(rec.tag)})
            out.append((f"{rec.tag} alpha={a:.6g}", rec.trace, rec.tag))
        return table, out
    from .shooting import WaveKind

    a2 = math.sqrt(table.bell_top * table.alpha_max)
    a3 = 0.5 * (table.h0_half + table.bell_top)
    H = solve_large(c, tol, samples=samples)
    out.append((f"(1) SaturatedC alpha={H.alpha:.6g}", H, WaveKind.SATURATED_C))
    out.append((f"(2) SaturatedC alpha={a2:.6g}", shoot(c, a2, tol, samples=samples),
                WaveKind.SATURATED_C))
    out.append((f"(3) SaturatedA alpha={a3:.6g}", shoot(c, a3, tol, samples=samples),
                WaveKind.SATURATED_A))
    h0 = solve_small(c, tol, samples=samples)
    out.append((f"(4) NonSaturated alpha={h0.alpha:.6g}", h0, WaveKind.NON_SATURATED))
    return table, out


def figure_checks(profiles, labels, z_tol=1e-2):
    """Crossings only at z = 0 and the ordering of the profiles on each side of 0."""
    from .wave import evaluate_u, profile_crossings

    cross = profile_crossings(profiles)
    bad = {f"{labels[i]} / {labels[j]}": zs for (i, j), zs in cross.items()
           if any(abs(z) > z_tol for z in zs)}
    ordering = {}
    for z in (-0.5, 0.5, 2.0):
        u = [float(evaluate_u(p, z)) for p in profiles]
        ordering[str(z)] = u
    # at z > 0 later curves (smaller alpha) lie above, reversed at z < 0
    right = ordering["0.5"]
    left = ordering["-0.5"]
    ok_order = (all(a < b for a, b in zip(right, right[1:]))
                and all(a >= b for a, b in zip(left, left[1:])))
    return {"crossings": {f"{labels[i]} / {labels[j]}": zs for (i, j), zs in cross.items()},
            "off_zero_crossings": bad, "ordering": ordering, "ordering_ok": ok_order,
            "passed": not bad and ok_order}


def _phase_curves(c, items, r_lo):
    from .ode_core import bell, lambda_bell, log_square_bound

    curves = []
    for label, tr, _ in items:
        m = tr.r >= r_lo
        curves.append({"label": label, "x": tr.r[m], "y": tr.h[m]})
    r = np.concatenate([np.geomspace(r_lo, 0.5, 400), 1 - np.geomspace(0.5, r_lo, 400)[1:]])
    lm, lp = lambda_pm(c)
    curves.append({"label": "bell r^2(1-r)^2/c^2", "x": r, "y": bell(c, r), "color": "#777777",
                   "dash": "6,4"})
    curves.append({"label": "lambda- bell", "x": r, "y": lambda_bell(lm, r), "color": "#8a5a00",
                   "dash": "2,3"})
    curves.append({"label": "lambda+ bell", "x": r, "y": lambda_bell(lp, r), "color": "#7a1fa8",
                   "dash": "2,3"})
    curves.append({"label": "c^2 log(1-r)^2", "x": r, "y": log_square_bound(c, r),
                   "color": "#aaaaaa", "dash": "8,3"})
    return curves


def cmd_figure(cfg, alphas=None):
    from .wave import reconstruct

    c = _need_c(cfg)
    _need_waves(c)
    tol = tolerances(cfg)
    conf = _public_config(cfg)
    if alphas:
        conf["alphas"] = list(alphas)
    out_dir = cfg["out"] or "figures"
    which = ("waves", "phase", "phase-log") if cfg["which"] == "all" else (cfg["which"],)
    table, items = figure_traces(c, tol, alphas, cfg["samples"])
    files = []
    summary = {"command": "figure", "c": c, "table": table.as_dict()}
    tag = f"c{c:g}"
    if "waves" in which:
        profiles = [reconstruct(tr, tol, kind) for _, tr, kind in items]
        labels = [lab for lab, _, _ in items]
        z_lo = -4.0
        z_hi = 8.0
        curves = []
        for lab, p in zip(labels, profiles):
            m = (p.z >= z_lo) & (p.z <= z_hi)
            x, y = p.z[m], p.u[m]
            if p.saturated and p.z_star > z_lo:
                x = np.concatenate([[z_lo, p.z_star], x])
                y = np.concatenate([[1.0, 1.0], y])
            curves.append({"label": lab, "x": x, "y": y})
        files.append(_write(line_plot(curves, title=f"travelling waves, c={c:g}", xlabel="z",
                                      ylabel="u", config=conf, version=__version__,
                                      xlim=(z_lo, z_hi), ylim=(0.0, 1.02)),
                            out_dir, f"waves_{tag}.svg"))
        files.append(_write(long_csv(curves, conf, __version__, "z", "u"), out_dir,
                            f"waves_{tag}.csv"))
        summary["z_star"] = {lab: p.z_star for lab, p in zip(labels, profiles)}
        summary["waves_check"] = figure_checks(profiles, labels)
    for kind in ("phase", "phase-log"):
        if kind not in which:
            continue
        log = kind == "phase-log"
        curves = _phase_curves(c, items, 1e-8 if log else 1e-4)
        top = 2.0 * table.plus_bell_top  # keeps the reference bells readable
        files.append(_write(line_plot(curves, title=f"(r,h) phase plane, c={c:g}", xlabel="r",
                                      ylabel="h", config=conf, version=__version__, xlog=log,
                                      ylog=log, xlim=(1e-8, 1.0) if log else (0.0, 1.0),
                                      ylim=(1e-20, 1e3) if log else (-0.05 * top, top)),
                            out_dir, f"{kind}_{tag}.svg"))
        files.append(_write(long_csv(curves, conf, __version__, "r", "h"), out_dir,
                            f"{kind}_{tag}.csv"))
    summary["files"] = files
    passed = summary.get("waves_check", {}).get("passed", True)
    summary["status"] = "ok" if passed else "fail"
    sys.stdout.write(to_json(summary, conf, __version__))
    if not passed:
        raise CLIFailure("profile crossings or ordering do not match", "figure_check", EXIT_CHECK)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites

VERIFY_SPEEDS = (2.0, 2.05, 2.1, 2.5, 3.0)


def suite_subsuper(cfg):
    from .verify import barrier_certificates

    speeds = (cfg["c"],) if cfg["c"] is not None else VERIFY_SPEEDS
    checks = []
    for c in speeds:
        _need_waves(c)
        for name, cert in barrier_certificates(c):
            if cert is None:
                checks.append({"name": f"c={c:g} {name}", "passed": True,
                               "details": "parameter range empty at this speed"})
            else:
                checks.append({"name": f"c={c:g} {name}", "passed": cert.passed,
                               "details": cert.as_dict()})
    return checks


def suite_recursions(cfg):
    from .verify import (bootstrap_Kn, bootstrap_Mn, epsilon_recursion, kn_root, mn_closed_form,
                         mn_first_negative)

    checks = []
    c = cfg["c"]
    eps = cfg["eps"]
    mn_cases = [(c, eps)] if c is not None and c * (1 + eps) < 2 else [(1.5, 0.1), (1.99, 0.001)]
    for cm, em in mn_cases:
        seq, n = bootstrap_Mn(cm, em)
        a = cm * (1 + em)
        closed = mn_closed_form(a, np.arange(n + 1))
        err = float(np.max(np.abs(seq[:-1] - closed[:-1]) / np.maximum(1, np.abs(closed[:-1]))))
        ok = n == mn_first_negative(a) and err < 1e-10
        checks.append({"name": f"M_n c={cm:g} eps={em:g}", "passed": ok,
                       "details": {"first_negative": n, "closed_form_index": mn_first_negative(a),
                                   "max_rel_error": err, "head": seq[:6]}})
    kn_cases = [(2.5, 0.0, 5.0), (2.1, 0.1, 5.0), (3.0, 0.3, 10.0)]
    if c is not None and c > 2:
        kn_cases.insert(0, (c, 0.0, 2 * c))
    for ck, r0, k0 in kn_cases:
        lim = bootstrap_Kn(ck, r0, k0)
        root = kn_root(ck, r0)
        checks.append({"name": f"K_n c={ck:g} r0={r0:g}", "passed": abs(lim - root) < 1e-10,
                       "details": {"limit": lim, "closed_form": root}})
    for ce, e0 in ([(c, 0.1)] if c is not None and c > 2 else []) + [(2.5, 0.1), (2.1, 0.5)]:
        seq, lim = epsilon_recursion(ce, e0)
        checks.append({"name": f"eps_n c={ce:g} eps0={e0:g}", "passed": abs(lim - 1) < 1e-10,
                       "details": {"limit": lim, "steps": len(seq) - 1}})
    return checks


def suite_residuals(cfg):
    from .shooting import classify, threshold_table
    from .verify import bump_family, tw_residual, weak_residual
    from .wave import reconstruct

    c = cfg["c"] if cfg["c"] is not None else 2.1
    _need_waves(c)
    tol = tolerances(cfg)
    table = threshold_table(c, tol)
    alphas = {"NonSaturated": table.h0_half, "SaturatedA": 0.5 * (table.h0_half + table.bell_top),
              "SaturatedB": table.bell_top, "SaturatedC": math.sqrt(table.bell_top * table.alpha_max),
              "SaturatedC(max)": table.H_half}
    checks = []
    for name, a in alphas.items():
        res = []
        for n in (cfg["samples"], 2 * cfg["samples"]):
            rec = classify(c, a, table, tol, samples=n)
            prof = reconstruct(rec.trace, tol, rec.tag)
            res.append(tw_residual(prof, c))
        weak = [weak_residual(prof, c, b) for b in bump_family(prof)]
        order = math.log2(res[0] / res[1]) if res[1] > 0 else math.inf
        checks.append({"name": f"tw_residual {name}", "passed": res[1] < 1e-4,
                       "details": {"alpha": a, "class": str(rec.tag), "residuals": res,
                                   "observed_order": order}})
        checks.append({"name": f"weak_residual {name}", "passed": max(weak) < 1e-3,
                       "details": {"residuals": weak}})
    return checks


def suite_focusing(cfg):
    from .kernel_focusing import Kernel, focusing_order, gaussian_bump

    f, d2 = gaussian_bump()
    res = focusing_order(Kernel.gaussian(), f, [0.2, 0.1, 0.05, 0.025], d2f=d2)
    return [{"name": "gaussian focusing slope", "passed": 1.8 <= res.slope <= 2.2,
             "details": {"slope": res.slope, "errors": res.errors, "eps": res.eps}}]


SUITES = {"subsuper": suite_subsuper, "recursions": suite_recursions,
          "residuals": suite_residuals, "focusing": suite_focusing}


def cmd_verify(cfg):
    names = list(SUITES) if cfg["suite"] == "all" else [cfg["suite"]]
    results = {}
    for name in names:
        try:
            results[name] = SUITES[name](cfg)
        except DegenKPPError as exc:
            results[name] = [{"name": name, "passed": False,
                              "details": f"{type(exc).__name__}: {exc}"}]
    failed = [chk["name"] for checks in results.values() for chk in checks if not chk["passed"]]
    payload = {"command": "verify", "status": "ok" if not failed else "fail", "failed": failed,
               "suites": results}
    if cfg["format"] != "json":
        raise CLIFailure("verify writes json only", "format")
    _write(to_json(payload, _public_config(cfg), __version__), cfg["out"])
    if failed:
        raise CLIFailure(f"{len(failed)} checks failed", "verify_failed", EXIT_CHECK,
                         {"failed": failed})
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, help="wave speed")
    common.add_argument("--tol-ode", dest="tol_ode", type=float, help="ODE relative tolerance")
    common.add_argument("--tol-bisect", dest="tol_bisect", type=float,
                        help="relative width of threshold bisections")
    common.add_argument("--samples", type=int, help="samples per trace")
    common.add_argument("--out", help="output file (directory for figure)")
    common.add_argument("--format", choices=_CHOICES["format"])
    common.add_argument("--config", help="key=value config file (default: $DEGEN_KPP_CONFIG)")

    p = argparse.ArgumentParser(prog="degen-kpp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("lambda", parents=[common], help="decay rates and bell heights")
    sp = sub.add_parser("classify", parents=[common], help="threshold table and class of alpha")
    sp.add_argument("--alpha", type=float)
    sp = sub.add_parser("wave", parents=[common], help="reconstruct one wave")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float)
    g.add_argument("--special", choices=_CHOICES["special"])
    sp = sub.add_parser("figure", parents=[common], help="wave and phase-plane figures")
    sp.add_argument("--which", choices=_CHOICES["which"])
    sp.add_argument("--alpha", type=float, nargs="+", dest="alphas")
    sp = sub.add_parser("verify", parents=[common], help="certificate and residual suites")
    sp.add_argument("--suite", choices=_CHOICES["suite"])
    sp.add_argument("--eps", type=float)
    return p


COMMANDS = {"lambda": cmd_lambda, "classify": cmd_classify, "wave": cmd_wave,
            "figure": cmd_figure, "verify": cmd_verify}


def _fail(exc):
    doc = {"schema": SCHEMA, "version": __version__, "status": "error", "code": exc.code,
           "reason": exc.reason, "details": exc.details}
    sys.stderr.write(json.dumps(doc, default=str) + "\n")
    return exc.exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if args.command == "figure":
            return cmd_figure(cfg, getattr(args, "alphas", None))
        return COMMANDS[args.command](cfg)
    except CLIFailure as exc:
        return _fail(exc)
    except DomainError as exc:
        return _fail(CLIFailure(str(exc), "domain"))
    except DegenKPPError as exc:
        return _fail(CLIFailure(f"{type(exc).__name__}: {exc}", "numerical", EXIT_NUMERIC))


if __name__ == "__main__":
    sys.exit(main())
