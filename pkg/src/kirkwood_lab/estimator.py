"""Scikit-learn adapter for curve ranking.

Wraps the audit/unwind/rank pipeline in the estimator API so rankings can
be composed with sklearn tooling: fit on an ordered run of complex values,
transform queries into real ranks.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .audit import PlausibilityScale, rank, trace_curve, unwind


def as_complex_points(x) -> np.ndarray:
    """Coerce a complex 1-d array or a real (n, 2) array into complex points."""
    arr = np.asarray(x)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(complex)
    raise ValueError(f"expected complex shape (n,) or real shape (n, 2), got {arr.shape}")


class CurveRanker(BaseEstimator, TransformerMixin):
    """Rank complex values by position along a non-self-intersecting curve.

    Parameters
    ----------
    v_false, v_true : float
        Endpoints of the target real interval.
    intersection_tol, closure_tol, snap_tol : float
        Geometric tolerances forwarded to the audit pipeline.
    """

    def __init__(self, v_false=0.0, v_true=1.0,
                 intersection_tol=1e-12, closure_tol=1e-9, snap_tol=1e-9):
        self.v_false = v_false
        self.v_true = v_true
        self.intersection_tol = intersection_tol
        self.closure_tol = closure_tol
        self.snap_tol = snap_tol

    def fit(self, X, y=None):
        """Validate the ordered values in X and build the order-preserving map."""
        points = as_complex_points(X)
        curve = trace_curve(points, np.arange(points.size, dtype=float))
        scale = PlausibilityScale(self.v_false, self.v_true)
        self.map_ = unwind(curve, scale,
                           intersection_tol=self.intersection_tol,
                           closure_tol=self.closure_tol)
        return self

    def transform(self, X) -> np.ndarray:
        """Interpolated ranks in [v_false, v_true] for query points on the curve."""
        if not hasattr(self, "map_"):
            raise NotFittedError("CurveRanker must be fitted before calling transform")
        return rank(self.map_, as_complex_points(X), snap_tol=self.snap_tol)
