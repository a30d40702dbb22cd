"""CSV, JSON and SVG writers.  Every file carries the run config and version."""

from __future__ import annotations

import enum
import io
import json
import math
from xml.sax.saxutils import escape

import numpy as np

SCHEMA = "degen-kpp/1"
PALETTE = ("#000000", "#1f4fd1", "#d12a1f", "#1a9a3a", "#8a5a00", "#7a1fa8", "#777777")


def _clean(obj):
    """Make ``obj`` JSON-serializable; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, enum.Enum):
        return str(obj)
    return obj


def to_json(payload, config, version):
    doc = {"schema": SCHEMA, "version": version, "config": config}
    doc.update(payload)
    return json.dumps(_clean(doc), indent=2, sort_keys=False) + "\n"


def to_csv(columns, config, version):
    """Header comment lines (config, version), a header row, 17 significant digits."""
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA} version={version}\n")
    buf.write("# config=" + json.dumps(_clean(config), sort_keys=True) + "\n")
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    buf.write(",".join(names) + "\n")
    for row in zip(*cols):
        buf.write(",".join(v if isinstance(v, str) else f"{float(v):.17g}" for v in row) + "\n")
    return buf.getvalue()


def long_csv(curves, config, version, xname="x", yname="y"):
    """Several curves in one table with a ``curve`` label column."""
    labels, xs, ys = [], [], []
    for cv in curves:
        labels += [cv["label"]] * len(cv["x"])
        xs.append(np.asarray(cv["x"], dtype=float))
        ys.append(np.asarray(cv["y"], dtype=float))
    return to_csv({"curve": labels, xname: np.concatenate(xs), yname: np.concatenate(ys)},
                  config, version)


# ---------------------------------------------------------------------------
# svg


def _nice_ticks(lo, hi, n=6):
    span = hi - lo
    raw = span / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v):
    return f"{v:g}"


def line_plot(curves, *, title, xlabel, ylabel, config, version, xlog=False, ylog=False,
              xlim=None, ylim=None, width=900, height=500):
    """Self-contained SVG line plot with axes, ticks and a legend.

    curves: dicts with keys label, x, y and optional color, dash, width.
    """
    left, right, top, bottom = 70, 270, 40, 55
    pw, ph = width - left - right, height - top - bottom

    def tr(v, log):
        v = np.asarray(v, dtype=float)
        if log:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(v > 0, np.log10(np.where(v > 0, v, 1.0)), np.nan)
        return v

    allx = np.concatenate([tr(cv["x"], xlog) for cv in curves])
    ally = np.concatenate([tr(cv["y"], ylog) for cv in curves])
    fx, fy = np.isfinite(allx), np.isfinite(ally)
    x0, x1 = (tr(xlim, xlog) if xlim is not None else (allx[fx].min(), allx[fx].max()))
    y0, y1 = (tr(ylim, ylog) if ylim is not None else (ally[fy].min(), ally[fy].max()))
    if x1 <= x0:
        x1 = x0 + 1
    if y1 <= y0:
        y1 = y0 + 1

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           "<metadata>" + escape(json.dumps(_clean({"schema": SCHEMA, "version": version,
                                                    "config": config}), sort_keys=True))
           + "</metadata>",
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
           f"{escape(title)}</text>",
           f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for axis, lo, hi, log in (("x", x0, x1, xlog), ("y", y0, y1, ylog)):
        ticks = (list(range(math.ceil(lo), math.floor(hi) + 1)) if log and hi - lo >= 1
                 else _nice_ticks(lo, hi))
        for t in ticks:
            lab = f"1e{t:d}" if log and float(t).is_integer() else _fmt(10**t if log else t)
            if axis == "x":
                X = px(t)
                out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" '
                           'stroke="black"/>')
                out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle">{lab}</text>')
            else:
                Y = py(t)
                out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
                out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">'
               f"{escape(xlabel)}</text>")
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    out.append('<g clip-path="url(#plot)">')
    for i, cv in enumerate(curves):
        color = cv.get("color", PALETTE[i % len(PALETTE)])
        dash = cv.get("dash")
        X = px(tr(cv["x"], xlog))
        Y = py(tr(cv["y"], ylog))
        ok = np.isfinite(X) & np.isfinite(Y)
        # split at gaps so missing values do not draw spurious segments
        runs = np.split(np.arange(X.size), np.flatnonzero(np.diff(ok.astype(int)) != 0) + 1)
        for run in runs:
            if run.size < 2 or not ok[run[0]]:
                continue
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X[run], Y[run]))
            style = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                       f'stroke-width="{cv.get("width", 1.6)}"{style}/>')
    out.append("</g>")
    lx = left + pw + 15
    for i, cv in enumerate(curves):
        color = cv.get("color", PALETTE[i % len(PALETTE)])
        ly = top + 12 + 18 * i
        dash = cv.get("dash")
        style = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"{style}/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(cv["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
