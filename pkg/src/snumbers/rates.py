"""Power-law rate estimation on log-log data."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import ValidationError

__all__ = ["PowerLawRateEstimator", "trimmed_slice"]


def trimmed_slice(count, trim):
    """Slice dropping ``floor(trim * count)`` points at each end."""
    cut = int(trim * count)
    if count - 2 * cut < 2:
        raise ValidationError("trim", f"leaves fewer than 2 of {count} points")
    return slice(cut, count - cut)


class PowerLawRateEstimator(RegressorMixin, BaseEstimator):
    """Fit ``y ~ C * n^slope`` by least squares on ``(log n, log y)``.

    Parameters
    ----------
    trim : float, default=0.1
        Fraction of points discarded at each end of the (sorted) sample
        before fitting; ``floor(trim * len)`` points are dropped per side.

    Attributes
    ----------
    slope_ : float
    intercept_ : float
        Natural log of the prefactor ``C``.
    max_residual_ : float
        Largest absolute log-space residual over the fitted points.
    n_fitted_ : int
    """

    def __init__(self, trim=0.1):
        self.trim = trim

    def fit(self, X, y):
        n = np.asarray(X, dtype=float).reshape(len(y), -1)
        if n.shape[1] != 1:
            raise ValidationError("X", "expected a single feature column of indices")
        n = n[:, 0]
        y = np.asarray(y, dtype=float)
        if not 0 <= self.trim < 0.5:
            raise ValidationError("trim", f"must lie in [0, 0.5), got {self.trim}")
        if np.any(n <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
            raise ValidationError("y", "log-log fitting needs positive finite data")
        if np.any(np.diff(n) <= 0):
            raise ValidationError("X", "indices must be strictly increasing")
        keep = trimmed_slice(len(n), self.trim)
        x, z = np.log(n[keep]), np.log(y[keep])
        A = np.column_stack([x, np.ones_like(x)])
        (self.slope_, self.intercept_), *_ = np.linalg.lstsq(A, z, rcond=None)
        self.slope_, self.intercept_ = float(self.slope_), float(self.intercept_)
        self.max_residual_ = float(np.abs(z - A @ np.array([self.slope_, self.intercept_])).max())
        self.n_fitted_ = int(len(x))
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        n = np.asarray(X, dtype=float).reshape(-1)
        return np.exp(self.intercept_) * n ** self.slope_
