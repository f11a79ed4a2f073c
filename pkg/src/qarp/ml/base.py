from __future__ import annotations

import numpy as np


class NotFittedError(RuntimeError):
    pass


class PredictionError(ValueError):
    pass


def check_X(X, n_features=None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise PredictionError("X must be 2-D")
    if n_features is not None and X.shape[1] != n_features:
        raise PredictionError(f"model was fitted on {n_features} features, got {X.shape[1]}")
    return X


class Classifier:
    """Common label bookkeeping: any hashable labels, stored sorted in ``classes_``."""

    def _encode(self, X, y):
        X = check_X(X)
        y = np.asarray(y)
        if len(X) != len(y) or len(y) == 0:
            raise ValueError("X and y must be non-empty and of equal length")
        self.classes_, yi = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        return X, yi

    def _check_fitted(self, X):
        if not hasattr(self, "classes_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        return check_X(X, self.n_features_in_)


class Regressor:
    def _prepare(self, X, y):
        X = check_X(X)
        y = np.asarray(y, dtype=float)
        if len(X) != len(y) or len(y) == 0:
            raise ValueError("X and y must be non-empty and of equal length")
        self.n_features_in_ = X.shape[1]
        return X, y

    def _check_fitted(self, X):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        return check_X(X, self.n_features_in_)


def vote(labels_per_model: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Row-wise mode of ``(n_models, n_rows)`` label indices; ties go to the lowest class."""
    n_models, n_rows = labels_per_model.shape
    counts = np.zeros((n_rows, len(classes)), dtype=int)
    for row in labels_per_model:
        counts[np.arange(n_rows), row] += 1
    return np.argmax(counts, axis=1)
