"""Linear models: hinge-loss SVM, logistic regression and ordinary least squares."""

from __future__ import annotations

import numpy as np

from .base import Classifier, Regressor


class ConvergenceError(RuntimeError):
    def __init__(self, msg, iteration):
        super().__init__(f"{msg} (iteration {iteration})")
        self.iteration = iteration


def train_binary_hinge(X, y_pm, C=1.0, n_iter=1000, step=0.01):
    """Minimise ``||w||^2 / 2 + C * sum(hinge)`` by full-batch subgradient descent.

    ``y_pm`` holds +1/-1 targets.  The objective is divided by ``n`` so the
    step size does not depend on the sample count.  Returns the iterate with
    the lowest objective, as subgradient steps are not monotone.
    """
    X = np.asarray(X, dtype=float)
    y_pm = np.asarray(y_pm, dtype=float)
    n, m = X.shape
    w = np.zeros(m)
    b = 0.0
    best = (np.inf, w.copy(), b)
    for it in range(n_iter + 1):
        margins = y_pm * (X @ w + b)
        hinge = np.maximum(0.0, 1.0 - margins)
        obj = 0.5 * w @ w / n + C * hinge.mean()
        if not np.isfinite(obj):
            raise ConvergenceError("hinge objective became non-finite", it)
        if obj < best[0]:
            best = (obj, w.copy(), b)
        if it == n_iter:
            break
        active = hinge > 0
        coef = -C * (y_pm * active) / n
        gw = w / n + X.T @ coef
        gb = coef.sum()
        w = w - step * gw
        b = b - step * gb
    return best[1], best[2]


class LinearSVM(Classifier):
    """Hinge-loss linear classifier; one-vs-rest for more than two classes."""

    def __init__(self, C=1.0, n_iter=1000, step=0.01):
        self.C = C
        self.n_iter = n_iter
        self.step = step

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        k = len(self.classes_)
        if k == 1:
            self.coef_, self.intercept_ = np.zeros((1, X.shape[1])), np.zeros(1)
            return self
        tasks = [1] if k == 2 else range(k)
        coefs, bs = [], []
        for c in tasks:
            w, b = train_binary_hinge(X, np.where(yi == c, 1.0, -1.0), self.C, self.n_iter, self.step)
            coefs.append(w)
            bs.append(b)
        self.coef_, self.intercept_ = np.array(coefs), np.array(bs)
        return self

    def decision_function(self, X):
        X = self._check_fitted(X)
        d = X @ self.coef_.T + self.intercept_
        return d[:, 0] if len(self.classes_) == 2 else d

    def predict(self, X):
        d = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.repeat(self.classes_, len(d))
        if len(self.classes_) == 2:
            return self.classes_[(d >= 0).astype(int)]
        return self.classes_[np.argmax(d, axis=1)]


class LogisticRegression(Classifier):
    """Multinomial logistic regression by full-batch gradient descent."""

    def __init__(self, n_iter=1000, step=0.1, l2=1e-4):
        self.n_iter = n_iter
        self.step = step
        self.l2 = l2

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        n, m = X.shape
        k = len(self.classes_)
        Y = np.eye(k)[yi]
        W = np.zeros((m, k))
        b = np.zeros(k)
        for _ in range(self.n_iter):
            P = _softmax(X @ W + b)
            G = (P - Y) / n
            W -= self.step * (X.T @ G + self.l2 * W)
            b -= self.step * G.sum(axis=0)
        self.coef_, self.intercept_ = W, b
        return self

    def predict_proba(self, X):
        X = self._check_fitted(X)
        return _softmax(X @ self.coef_ + self.intercept_)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]


def _softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


class LinearRegression(Regressor):
    def fit(self, X, y):
        X, y = self._prepare(X, y)
        # centring keeps the intercept out of the minimum-norm solution
        # when there are more features than rows
        mx, my = X.mean(axis=0), y.mean()
        self.coef_, *_ = np.linalg.lstsq(X - mx, y - my, rcond=None)
        self.intercept_ = float(my - mx @ self.coef_)
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        return X @ self.coef_ + self.intercept_
