"""scikit-learn style front end: fit a speed, predict classes of shooting values."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import DomainError
from .ode_core import DEFAULT_TOL, lambda_pm
from .shooting import classify, solve_large, solve_small, threshold_table
from .validation import check_array_1d, check_speed
from .wave import reconstruct


class TravellingWaveFamily(BaseEstimator):
    """The family of travelling waves at one speed.

    ``fit`` computes the threshold table; ``predict`` maps shooting values
    h(1/2) to class tags; ``profile`` reconstructs one wave.

    Parameters
    ----------
    c : float
        Wave speed, at least 2.
    tol : ToleranceSet or None
        Defaults to the package tolerances.
    samples : int
        Samples per trace.

    Examples
    --------
    >>> fam = TravellingWaveFamily(c=2.1).fit()
    >>> fam.predict([0.005, 1.0]).tolist()
    ['BelowSmall', 'SaturatedC']
    """

    def __init__(self, c=2.1, tol=None, samples=800):
        self.c = c
        self.tol = tol
        self.samples = samples

    def _tol(self):
        return DEFAULT_TOL if self.tol is None else self.tol

    def fit(self, X=None, y=None):
        """Compute the thresholds.  ``X`` and ``y`` are ignored."""
        c = check_speed(self.c, minimum=2.0)
        self.lambda_minus_, self.lambda_plus_ = lambda_pm(c)
        self.table_ = threshold_table(c, self._tol())
        self.thresholds_ = self.table_.as_dict()
        return self

    def classify(self, alpha):
        """Full classification record of one shooting value."""
        check_is_fitted(self, "table_")
        return classify(self.c, alpha, self.table_, self._tol(), samples=self.samples)

    def predict(self, X):
        """Class tags (strings) for an array of shooting values."""
        check_is_fitted(self, "table_")
        alphas = check_array_1d(np.ravel(np.asarray(X, dtype=float)), "X")
        return np.array([str(self.classify(a).tag) for a in alphas], dtype=object)

    def profile(self, alpha="small"):
        """WaveProfile for a shooting value, or "small"/"large" for the extreme waves."""
        check_is_fitted(self, "table_")
        tol = self._tol()
        if alpha == "small":
            return reconstruct(solve_small(self.c, tol, samples=self.samples), tol)
        if alpha == "large":
            return reconstruct(solve_large(self.c, tol, samples=self.samples), tol)
        rec = self.classify(alpha)
        if not rec.tag.is_wave:
            raise DomainError(f"no wave for alpha={alpha!r} ({rec.tag})")
        return reconstruct(rec.trace, tol, rec.tag)
