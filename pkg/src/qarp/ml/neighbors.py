from __future__ import annotations

import numpy as np

from .base import Classifier, Regressor


def pairwise_distances(A, B) -> np.ndarray:
    """Euclidean distances between rows of ``A`` and rows of ``B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2.0 * A @ B.T
    return np.sqrt(np.maximum(sq, 0.0))


def _neighbors(train, query, k):
    d = pairwise_distances(query, train)
    # stable sort: equal distances resolve to the lower training index
    return np.argsort(d, axis=1, kind="stable")[:, : min(k, len(train))]


class KNeighborsClassifier(Classifier):
    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        self._X, self._y = self._encode(X, y)
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        nb = self._y[_neighbors(self._X, X, self.n_neighbors)]
        counts = np.zeros((len(X), len(self.classes_)), dtype=int)
        for j in range(nb.shape[1]):
            counts[np.arange(len(X)), nb[:, j]] += 1
        return self.classes_[np.argmax(counts, axis=1)]


class KNeighborsRegressor(Regressor):
    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        self._X, self._y = self._prepare(X, y)
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        return self._y[_neighbors(self._X, X, self.n_neighbors)].mean(axis=1)


class NearestCentroid(Classifier):
    def fit(self, X, y):
        X, yi = self._encode(X, y)
        self.centroids_ = np.array([X[yi == c].mean(axis=0) for c in range(len(self.classes_))])
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        d = pairwise_distances(X, self.centroids_)
        return self.classes_[np.argmin(d, axis=1)]
