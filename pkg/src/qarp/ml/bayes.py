from __future__ import annotations

import numpy as np

from .base import Classifier

VAR_FLOOR = 1e-9


class GaussianNB(Classifier):
    """Gaussian naive Bayes with empirical class priors."""

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        k = len(self.classes_)
        self.theta_ = np.array([X[yi == c].mean(axis=0) for c in range(k)])
        self.var_ = np.maximum(np.array([X[yi == c].var(axis=0) for c in range(k)]), VAR_FLOOR)
        self.class_prior_ = np.bincount(yi, minlength=k) / len(yi)
        return self

    def joint_log_likelihood(self, X):
        X = self._check_fitted(X)
        ll = -0.5 * (
            np.log(2 * np.pi * self.var_).sum(axis=1)[None, :]
            + (((X[:, None, :] - self.theta_[None]) ** 2) / self.var_[None]).sum(axis=2)
        )
        return ll + np.log(self.class_prior_)[None, :]

    def predict(self, X):
        jll = self.joint_log_likelihood(X)
        return self.classes_[np.argmax(jll, axis=1)]
