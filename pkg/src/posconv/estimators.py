"""scikit-learn style wrappers around the splitting and the verdict engine.

``fit`` takes a representation rather than a data matrix; ``transform`` and
``predict`` act on rows of coordinate vectors.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import AnalysisOptions, verdict_engine
from .exceptions import DimensionMismatch, NotConvergent
from .jdlg import jdlg_split


def _rows(X, n):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != n:
        raise DimensionMismatch(f"expected rows of length {n}, got {X.shape[1]}")
    return X


class JdlgDecomposition(TransformerMixin, BaseEstimator):
    """Reversible/stable splitting as a transformer.

    Parameters
    ----------
    tol : float
        Width of the unimodular band for the spectral projection.

    Attributes
    ----------
    projection_ : ndarray (n, n)
    reversible_basis_, stable_basis_ : ndarray
    split_ : JdlgSplit
    """

    def __init__(self, tol=1e-8):
        self.tol = tol

    def fit(self, rep, y=None):
        self.split_ = jdlg_split(rep, self.tol)
        self.projection_ = self.split_.projection
        self.reversible_basis_ = self.split_.reversible_basis
        self.stable_basis_ = self.split_.stable_basis
        self.n_features_in_ = rep.n
        return self

    def transform(self, X):
        """Reversible components ``P x`` of each row."""
        check_is_fitted(self, "projection_")
        return _rows(X, self.n_features_in_) @ self.projection_.T

    def stable_part(self, X):
        check_is_fitted(self, "projection_")
        X = _rows(X, self.n_features_in_)
        return X - X @ self.projection_.T


class ConvergenceAnalyzer(BaseEstimator):
    """Verdict engine as an estimator; ``predict`` returns the limits."""

    def __init__(self, tol=1e-8, horizon=64, depth=8, epsilon=0.1):
        self.tol = tol
        self.horizon = horizon
        self.depth = depth
        self.epsilon = epsilon

    def fit(self, rep, y=None):
        opt = AnalysisOptions(tol=self.tol, horizon=self.horizon, depth=self.depth,
                              epsilon=self.epsilon)
        self.report_ = verdict_engine(rep, opt)
        self.limit_projection_ = self.report_.limit_projection
        self.n_features_in_ = rep.n
        return self

    def predict(self, X):
        """Limits ``lim T_t x`` of each row.

        Raises
        ------
        NotConvergent
            If no convergence verdict was issued.
        """
        check_is_fitted(self, "report_")
        if self.limit_projection_ is None:
            raise NotConvergent(f"no convergence verdict ({self.report_.conclusion})")
        return _rows(X, self.n_features_in_) @ self.limit_projection_.T


__all__ = ["JdlgDecomposition", "ConvergenceAnalyzer"]
