"""Finite-difference weights on nonuniform grids."""

import numpy as np

from .exceptions import ResolutionError


def fornberg_weights(x0, x, m):
    """Weights for derivatives 0..m at x0 from nodes x (Fornberg recursion)."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def fd_weights_grid(x, y, m, width=5):
    """m-th derivative of samples y(x) by centered ``width``-point stencils.

    Stencils are centered where the grid allows and shifted inward at the
    ends (one-sided near the boundaries).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < width:
        raise ResolutionError(f"need at least {width} samples, got {n}")
    half = width // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = slice(lo, lo + width)
        out[i] = fornberg_weights(x[i], x[idx], m) @ y[idx]
    return out
