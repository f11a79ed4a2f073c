"""Tree ensembles: bagging, random forests, AdaBoost (SAMME / R2), gradient boosting."""

from __future__ import annotations

import numpy as np

from .base import Classifier, Regressor, vote
from .tree import DecisionTreeClassifier, DecisionTreeRegressor


class BaggingClassifier(Classifier):
    """Majority vote of trees grown on bootstrap resamples."""

    max_features = None

    def __init__(self, n_estimators=10, random_state=None, bootstrap=True):
        self.n_estimators = n_estimators
        self.random_state = random_state
        self.bootstrap = bootstrap

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        rng = np.random.default_rng(self.random_state)
        self.estimators_ = []
        for _ in range(self.n_estimators):
            idx = rng.integers(0, len(X), len(X)) if self.bootstrap else np.arange(len(X))
            tree = DecisionTreeClassifier(
                max_features=self.max_features, random_state=int(rng.integers(2**31))
            )
            # labels stay as indices so every member shares one class axis
            tree.fit(X[idx], yi[idx])
            self.estimators_.append(tree)
        return self

    def member_votes(self, X):
        X = self._check_fitted(X)
        return np.array([t.predict(X) for t in self.estimators_])

    def predict(self, X):
        votes = self.member_votes(X)
        return self.classes_[vote(votes, self.classes_)]


class RandomForestClassifier(BaggingClassifier):
    max_features = "sqrt"


class BaggingRegressor(Regressor):
    max_features = None

    def __init__(self, n_estimators=10, random_state=None, bootstrap=True):
        self.n_estimators = n_estimators
        self.random_state = random_state
        self.bootstrap = bootstrap

    def fit(self, X, y):
        X, y = self._prepare(X, y)
        rng = np.random.default_rng(self.random_state)
        self.estimators_ = []
        for _ in range(self.n_estimators):
            idx = rng.integers(0, len(X), len(X)) if self.bootstrap else np.arange(len(X))
            tree = DecisionTreeRegressor(
                max_features=self.max_features, random_state=int(rng.integers(2**31))
            )
            self.estimators_.append(tree.fit(X[idx], y[idx]))
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        return np.mean([t.predict(X) for t in self.estimators_], axis=0)


class RandomForestRegressor(BaggingRegressor):
    max_features = "sqrt"


class AdaBoostClassifier(Classifier):
    """Multi-class AdaBoost (SAMME) over full-depth CART trees."""

    def __init__(self, n_estimators=50, learning_rate=1.0, max_depth=None, random_state=None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.random_state = random_state

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        k = len(self.classes_)
        n = len(X)
        w = np.full(n, 1.0 / n)
        self.estimators_, self.estimator_weights_, self.estimator_errors_ = [], [], []
        if k == 1:
            return self
        for m in range(self.n_estimators):
            tree = DecisionTreeClassifier(max_depth=self.max_depth, random_state=self.random_state)
            tree.fit(X, yi, sample_weight=w)
            wrong = tree.predict(X) != yi
            err = float(np.dot(w, wrong) / w.sum())
            if err <= 0:
                self.estimators_.append(tree)
                self.estimator_weights_.append(1.0)
                self.estimator_errors_.append(0.0)
                break
            if err >= 1.0 - 1.0 / k:
                # worse than chance: keep the first learner only so the model is usable
                if not self.estimators_:
                    self.estimators_.append(tree)
                    self.estimator_weights_.append(1.0)
                    self.estimator_errors_.append(err)
                break
            alpha = self.learning_rate * (np.log((1 - err) / err) + np.log(k - 1))
            self.estimators_.append(tree)
            self.estimator_weights_.append(alpha)
            self.estimator_errors_.append(err)
            w = w * np.exp(alpha * wrong)
            w /= w.sum()
        return self

    def decision_function(self, X):
        X = self._check_fitted(X)
        k = len(self.classes_)
        score = np.zeros((len(X), k))
        for tree, a in zip(self.estimators_, self.estimator_weights_):
            score[np.arange(len(X)), tree.predict(X)] += a
        return score

    def predict(self, X):
        score = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.repeat(self.classes_, len(score))
        return self.classes_[np.argmax(score, axis=1)]


class AdaBoostRegressor(Regressor):
    """AdaBoost.R2 with the linear loss; members are fitted on weighted resamples."""

    def __init__(self, n_estimators=50, learning_rate=1.0, max_depth=None, random_state=None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.random_state = random_state

    def fit(self, X, y):
        X, y = self._prepare(X, y)
        n = len(X)
        rng = np.random.default_rng(self.random_state)
        w = np.full(n, 1.0 / n)
        self.estimators_, self.estimator_weights_ = [], []
        fallback = None
        for m in range(self.n_estimators):
            idx = rng.choice(n, size=n, replace=True, p=w)
            tree = DecisionTreeRegressor(max_depth=self.max_depth).fit(X[idx], y[idx])
            err_vec = np.abs(tree.predict(X) - y)
            top = err_vec.max()
            if top > 0:
                err_vec = err_vec / top
            err = float(np.dot(w, err_vec))
            if err <= 0:
                self.estimators_.append(tree)
                self.estimator_weights_.append(1.0)
                break
            if err >= 0.5:
                if self.estimators_:
                    break
                # nothing boosted yet: redraw, keeping the last draw if every one fails
                fallback = tree
                continue
            beta = err / (1.0 - err)
            self.estimators_.append(tree)
            self.estimator_weights_.append(self.learning_rate * np.log(1.0 / beta))
            w = w * beta ** ((1.0 - err_vec) * self.learning_rate)
            w /= w.sum()
        if not self.estimators_:
            self.estimators_.append(fallback)
            self.estimator_weights_.append(1.0)
        return self

    def predict(self, X):
        X = self._check_fitted(X)
        preds = np.array([t.predict(X) for t in self.estimators_]).T  # (rows, members)
        weights = np.asarray(self.estimator_weights_)
        order = np.argsort(preds, axis=1, kind="stable")
        cum = np.cumsum(weights[order], axis=1)
        # weighted median: first member whose cumulative weight reaches half the total
        pos = np.argmax(cum >= 0.5 * cum[:, -1:], axis=1)
        return preds[np.arange(len(X)), order[np.arange(len(X)), pos]]


class GradientBoostingClassifier(Classifier):
    """Log-loss gradient boosting with depth-limited regression trees and Newton leaves."""

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3, random_state=None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.random_state = random_state

    def fit(self, X, y):
        X, yi = self._encode(X, y)
        k = len(self.classes_)
        self.stages_ = []
        if k == 1:
            self.init_ = np.zeros(1)
            return self
        prior = np.bincount(yi, minlength=k) / len(yi)
        if k == 2:
            self.init_ = np.array([np.log(prior[1] / prior[0])])
            Y = (yi == 1).astype(float)[:, None]
        else:
            self.init_ = np.log(prior)
            Y = np.eye(k)[yi]
        F = np.tile(self.init_, (len(X), 1))
        for _ in range(self.n_estimators):
            P = self._link(F)
            R = Y - P
            stage = []
            for j in range(R.shape[1]):
                tree = DecisionTreeRegressor(max_depth=self.max_depth).fit(X, R[:, j])
                leaves = tree.apply(X)
                for leaf in set(leaves):
                    rows = np.array([lf is leaf for lf in leaves])
                    r = R[rows, j]
                    if k == 2:
                        den = np.sum(P[rows, 0] * (1 - P[rows, 0]))
                        num = r.sum()
                    else:
                        den = np.sum(np.abs(r) * (1 - np.abs(r)))
                        num = (k - 1) / k * r.sum()
                    leaf.value = float(num / den) if abs(den) > 1e-150 else 0.0
                F[:, j] += self.learning_rate * tree.predict(X)
                stage.append(tree)
            self.stages_.append(stage)
        return self

    def _link(self, F):
        if F.shape[1] == 1:
            return 1.0 / (1.0 + np.exp(-F))
        Z = F - F.max(axis=1, keepdims=True)
        E = np.exp(Z)
        return E / E.sum(axis=1, keepdims=True)

    def decision_function(self, X):
        X = self._check_fitted(X)
        F = np.tile(self.init_, (len(X), 1))
        for stage in self.stages_:
            for j, tree in enumerate(stage):
                F[:, j] += self.learning_rate * tree.predict(X)
        return F

    def predict(self, X):
        F = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.repeat(self.classes_, len(F))
        if F.shape[1] == 1:
            return self.classes_[(F[:, 0] > 0).astype(int)]
        return self.classes_[np.argmax(F, axis=1)]
