"""Piecewise Chebyshev grids with spectral cumulative integration."""

import numpy as np
from numpy.polynomial import chebyshev as C


class ChebPanels:
    """Chebyshev points of the first kind on consecutive panels.

    Parameters
    ----------
    edges : array_like
        Increasing panel edges.
    order : int
        Nodes per panel.
    """

    def __init__(self, edges, order=16):
        self.edges = np.asarray(edges, dtype=float)
        self.order = m = int(order)
        xi = np.cos(np.pi * (np.arange(m) + 0.5) / m)[::-1]
        self.xi = xi
        vinv = np.linalg.inv(C.chebvander(xi, m - 1))
        self._vinv = vinv
        # integral from -1 to each node, and over the whole panel, of the interpolant
        eye = np.eye(m)
        ints = [C.chebint(eye[j], lbnd=-1) for j in range(m)]
        self._S = np.column_stack([C.chebval(xi, ci) for ci in ints]) @ vinv
        self._w = np.array([C.chebval(1.0, ci) for ci in ints]) @ vinv
        lo, hi = self.edges[:-1], self.edges[1:]
        self.mid = 0.5 * (lo + hi)
        self.half = 0.5 * (hi - lo)
        self.nodes = self.mid[:, None] + self.half[:, None] * xi[None, :]

    @property
    def lo(self):
        return float(self.edges[0])

    @property
    def hi(self):
        return float(self.edges[-1])

    def cumulative(self, vals):
        """Integral from the first edge to every node, and the total."""
        inner = (vals @ self._S.T) * self.half[:, None]
        tot = (vals @ self._w) * self.half
        base = np.concatenate([[0.0], np.cumsum(tot)[:-1]])
        return inner + base[:, None], float(base[-1] + tot[-1])

    def interpolant(self, vals):
        """Callable evaluating the panelwise interpolant of ``vals``."""
        coef = vals @ self._vinv.T
        edges, mid, half, m = self.edges, self.mid, self.half, self.order

        def f(x):
            x = np.asarray(x, dtype=float)
            flat = x.ravel()
            idx = np.clip(np.searchsorted(edges, flat, side="right") - 1, 0, len(mid) - 1)
            xi = (flat - mid[idx]) / half[idx]
            vander = C.chebvander(xi, m - 1)
            return np.einsum("ij,ij->i", vander, coef[idx]).reshape(x.shape)

        return f
