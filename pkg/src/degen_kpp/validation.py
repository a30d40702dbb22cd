"""Small argument checks used at public entry points."""

import math
import numbers

import numpy as np

from .exceptions import DomainError


def check_real(value, name, *, lo=None, hi=None, lo_open=True, hi_open=True):
    """Return ``value`` as a finite float, optionally bounded."""
    if isinstance(value, bool) or not isinstance(value, (numbers.Real, np.floating, np.integer)):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if lo is not None and (x < lo or (lo_open and x == lo)):
        op = ">" if lo_open else ">="
        raise DomainError(f"{name} must be {op} {lo}, got {x}")
    if hi is not None and (x > hi or (hi_open and x == hi)):
        op = "<" if hi_open else "<="
        raise DomainError(f"{name} must be {op} {hi}, got {x}")
    return x


def check_speed(c, *, minimum=None):
    """Validate a wave speed. ``minimum`` is inclusive (used for c >= 2)."""
    c = check_real(c, "c", lo=0.0)
    if minimum is not None and c < minimum:
        raise DomainError(f"c must be >= {minimum}, got {c}")
    return c


def check_radius(r, name="r", *, closed=False):
    """Validate r in (0, 1), or [0, 1] when ``closed``."""
    return check_real(r, name, lo=0.0, hi=1.0, lo_open=not closed, hi_open=not closed)


def check_interval(interval, name="interval", *, lo=0.0, hi=1.0):
    """Validate an ordered pair inside [lo, hi]."""
    try:
        a, b = interval
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a pair (lo, hi), got {interval!r}") from None
    a = check_real(a, f"{name}[0]", lo=lo, lo_open=False)
    b = check_real(b, f"{name}[1]", hi=hi, hi_open=False)
    if not a < b:
        raise DomainError(f"{name} must satisfy lo < hi, got ({a}, {b})")
    return a, b


def check_array_1d(x, name="x", *, finite=True):
    """Return ``x`` as a 1-D float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if finite and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr
