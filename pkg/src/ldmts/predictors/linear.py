"""Closed-form multi-output ridge regression on flattened history windows."""

from __future__ import annotations

import warnings

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import LinAlgWarning, solve
from sklearn.base import BaseEstimator, RegressorMixin

from ..validation import as_sample_matrix


class RidgePredictor(RegressorMixin, BaseEstimator):
    """Linear map from history windows to future windows, solved in closed form.

    Fitting solves the regularized normal equations (X'X + lambda I) W = X'Y on
    mean-centered X and Y, which makes the intercept exact:

        y_hat = y_mean + (x - x_mean) W

    X rows are flattened length-L histories, Y rows length-H futures; channels
    share one set of weights, so multichannel series contribute one row per
    (window, channel) pair.

    Attributes after fit: ``coef_`` (H, L), ``intercept_`` (H,),
    ``n_features_in_``.
    """

    def __init__(self, ridge_lambda: float = 0.0):
        self.ridge_lambda = ridge_lambda

    def fit(self, X, y):
        X = as_sample_matrix(X, "X")
        y = np.asarray(y, dtype=np.float64)
        self._single_output = y.ndim == 1
        if self._single_output:
            y = y[:, np.newaxis]
        y = as_sample_matrix(y, "y")
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        lam = float(self.ridge_lambda)
        if lam < 0:
            raise ValueError(f"ridge_lambda must be >= 0, got {lam}")

        x_mean = X.mean(axis=0)
        y_mean = y.mean(axis=0)
        Xc = X - x_mean
        gram = Xc.T @ Xc
        gram[np.diag_indices_from(gram)] += lam
        try:
            # a solve that merely warns about an unusable conditioning estimate
            # is as broken as one that raises, so escalate the warning
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                W = solve(gram, Xc.T @ (y - y_mean), assume_a="pos")
        except (LinAlgError, LinAlgWarning) as exc:
            raise LinAlgError(
                "normal equations are singular (collinear or constant inputs); "
                "set ridge_lambda > 0"
            ) from exc

        self.coef_ = W.T
        self.intercept_ = y_mean - x_mean @ W
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "coef_"):
            raise RuntimeError("predictor is not fitted")
        X = as_sample_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, predictor was fit with {self.n_features_in_}"
            )
        out = X @ self.coef_.T + self.intercept_
        return out[:, 0] if self._single_output else out

    def normal_equation_residual(self, X, y) -> float:
        """max |(X'X + lambda I) W - X'Y| on centered data, for solver checks."""
        X = as_sample_matrix(X, "X")
        y = np.asarray(y, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, np.newaxis]
        Xc = X - X.mean(axis=0)
        Yc = y - y.mean(axis=0)
        gram = Xc.T @ Xc
        gram[np.diag_indices_from(gram)] += float(self.ridge_lambda)
        return float(np.max(np.abs(gram @ self.coef_.T - Xc.T @ Yc)))
