"""scikit-learn style front end and point-set evaluation.

>>> from screened_lgf import ScreenedPoissonLGF
>>> est = ScreenedPoissonLGF(alpha1=1.0, c2=4.0, eps=1e-12).fit([[0, 0], [3, 2]])
>>> est.method_.tag.value
'series'
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .core import (
    SERIES_CAP,
    LatticeConfig,
    Method,
    MethodChoice,
    as_tolerance,
    select_method,
)
from .fft_batch import batch_row
from .quad1d import DEFAULT_DELTA, trapezoid_eval
from .series import series_eval, series_table

# build a full series table when the bounding box is at most this many times
# larger than the request itself
_BOX_SLACK = 4


def check_points(X) -> np.ndarray:
    """Validate an (n_points, 2) array of integer lattice coordinates."""
    X = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=1)
    if X.shape[1] != 2:
        raise ValueError(f"expected lattice points with 2 columns, got {X.shape[1]}")
    Xi = np.asarray(X).astype(np.int64)
    if not np.array_equal(Xi, np.asarray(X, dtype=float)):
        raise ValueError("lattice coordinates must be integers")
    return Xi


def plan_points(cfg: LatticeConfig, points: np.ndarray, tol,
                series_cap: int = SERIES_CAP, delta: float = DEFAULT_DELTA) -> MethodChoice:
    pts = np.abs(points)
    n_max = int(pts[:, 0].max())
    row = n_max + 1 if len(pts) > 1 else None
    return select_method(cfg, tol, row_length=row, n_max=n_max, series_cap=series_cap, delta=delta)


def evaluate_points(cfg: LatticeConfig, points, tol, series_cap: int = SERIES_CAP,
                    delta: float = DEFAULT_DELTA, choice: MethodChoice | None = None) -> np.ndarray:
    """B_c at each row of ``points``, every value within ``tol``."""
    tol = as_tolerance(tol)
    pts = np.abs(check_points(points))
    if choice is None:
        choice = plan_points(cfg, pts, tol, series_cap, delta)
    ns, ms = pts[:, 0], pts[:, 1]
    if choice.tag is Method.SERIES:
        n_hi, m_hi = int(ns.max()), int(ms.max())
        if (n_hi + 1) * (m_hi + 1) <= _BOX_SLACK * len(pts) + 1024:
            table = series_table(cfg, n_hi, m_hi, max(choice.size, 1))
            return table[ms, ns]
        return np.array([series_eval(cfg, p, max(choice.size, 1)) for p in pts.tolist()])
    if choice.tag is Method.QUAD1D:
        return np.array([trapezoid_eval(cfg, p, choice.size) for p in pts.tolist()])
    out = np.empty(len(pts))
    L = int(ns.max())
    for m in np.unique(ms):
        sel = ms == m
        out[sel] = batch_row(cfg, int(m), L, tol, delta).values[ns[sel]]
    return out


class ScreenedPoissonLGF(BaseEstimator):
    """Lattice Green's function of the screened Poisson stencil as an estimator.

    ``fit`` validates the configuration and selects a backend for the
    training points; ``predict`` returns B_c at each (n, m) row, certified to
    ``eps`` absolute error.
    """

    def __init__(self, alpha1=1.0, c2=1.0, eps=1e-12, delta=DEFAULT_DELTA, series_cap=SERIES_CAP):
        self.alpha1 = alpha1
        self.c2 = c2
        self.eps = eps
        self.delta = delta
        self.series_cap = series_cap

    def fit(self, X, y=None):
        X = check_points(X)
        self.config_ = LatticeConfig(self.alpha1, self.c2)
        self.tolerance_ = as_tolerance(self.eps)
        self.n_max_ = int(np.abs(X[:, 0]).max())
        self.method_ = plan_points(self.config_, X, self.tolerance_, self.series_cap, self.delta)
        return self

    def predict(self, X):
        check_is_fitted(self, "config_")
        X = check_points(X)
        # a series plan holds for every point; quadrature plans depend on n_max
        choice = self.method_ if self.method_.tag is Method.SERIES else None
        return evaluate_points(self.config_, X, self.tolerance_, self.series_cap, self.delta, choice)
