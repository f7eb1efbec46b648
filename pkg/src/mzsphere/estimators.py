"""scikit-learn style wrappers around the S^2 sampling tools."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .harmonic import dim_pi, evaluation_matrix
from .mz import frame_bounds_l2, interpolate_min_norm
from .sphere import as_points


class SphericalHarmonicFeatures(TransformerMixin, BaseEstimator):
    """Map points of S^2, given as rows (x, y, z), to the (L+1)^2 basis values.

    Parameters
    ----------
    degree : int
        Maximal degree L.
    """

    def __init__(self, degree: int = 8):
        self.degree = degree

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError("expected points of S^2 with 3 coordinates")
        self.n_features_in_ = 3
        self.n_output_features_ = dim_pi(2, self.degree)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_output_features_")
        X = check_array(X)
        return evaluation_matrix(self.degree, as_points(X, 2))


class HarmonicInterpolator(RegressorMixin, BaseEstimator):
    """Minimum-norm fit of sampled values by a polynomial of degree <= L on S^2.

    With at most (L+1)^2 well-spread points the fit interpolates; with more
    it is the least-squares fit of minimal coefficient norm.

    Attributes
    ----------
    coef_ : ndarray of shape ((L+1)^2,)
    residual_, condition_, rank_ : float, float, int
    """

    def __init__(self, degree: int = 8):
        self.degree = degree

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        res = interpolate_min_norm(as_points(X, 2), self.degree, y)
        self.coef_ = res.coefficients
        self.residual_ = res.residual
        self.condition_ = res.condition
        self.rank_ = res.rank
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return evaluation_matrix(self.degree, as_points(X, 2)) @ self.coef_


class MZFrameAnalyzer(BaseEstimator):
    """Fit stores the exact p = 2 frame bounds of a sample set at degree L."""

    def __init__(self, degree: int = 8):
        self.degree = degree

    def fit(self, X, y=None):
        X = check_array(X)
        fb = frame_bounds_l2(as_points(X, 2), self.degree)
        self.lower_bound_ = fb.A
        self.upper_bound_ = fb.B
        self.condition_ = fb.condition
        self.n_features_in_ = 3
        return self

    def score(self, X=None, y=None):
        """Ratio A/B in [0, 1]; 1 for a tight frame."""
        check_is_fitted(self, "upper_bound_")
        return self.lower_bound_ / self.upper_bound_
