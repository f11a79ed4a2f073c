"""CART decision trees (Gini for classification, squared error for regression).

Split ties are broken by lowest feature index, then lowest threshold.
"""

from __future__ import annotations

import numpy as np

from .base import Classifier, NotFittedError, Regressor, check_X

_TOL = 1e-12


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, value):
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.value = value


def _gini_split(xs, Ys, ws):
    """Weighted child impurity for every cut position of a sorted column.

    ``Ys`` holds per-row weighted one-hot targets.  Returns (impurity, valid).
    """
    left = np.cumsum(Ys, axis=0)[:-1]
    total = Ys.sum(axis=0)
    right = total - left
    wl = left.sum(axis=1)
    wr = right.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        gl = wl - (left**2).sum(axis=1) / wl
        gr = wr - (right**2).sum(axis=1) / wr
    imp = np.nan_to_num(gl) + np.nan_to_num(gr)
    valid = xs[1:] > xs[:-1]
    return imp, valid


def _sse_split(xs, ys, ws):
    wy = ws * ys
    wyy = wy * ys
    cl_w, cl_y, cl_yy = np.cumsum(ws)[:-1], np.cumsum(wy)[:-1], np.cumsum(wyy)[:-1]
    tw, ty, tyy = ws.sum(), wy.sum(), wyy.sum()
    cr_w, cr_y, cr_yy = tw - cl_w, ty - cl_y, tyy - cl_yy
    with np.errstate(invalid="ignore", divide="ignore"):
        sl = cl_yy - cl_y**2 / cl_w
        sr = cr_yy - cr_y**2 / cr_w
    imp = np.nan_to_num(sl) + np.nan_to_num(sr)
    valid = (xs[1:] > xs[:-1]) & (cl_w > 0) & (cr_w > 0)
    return imp, valid


class _BaseTree:
    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.random_state = random_state

    # subclasses define: _targets(y) -> per-row target block, _leaf(idx), _impurity(idx), _split_fn
    def _n_features_to_try(self, m):
        mf = self.max_features
        if mf is None:
            return m
        if mf == "sqrt":
            return max(1, int(np.sqrt(m)))
        if isinstance(mf, float):
            return max(1, int(mf * m))
        return max(1, min(int(mf), m))

    def _build(self, X, w):
        self._rng = np.random.default_rng(self.random_state)
        self.n_features_in_ = X.shape[1]
        self._k = self._n_features_to_try(X.shape[1])
        self.root_ = self._grow(X, np.arange(len(X)), w, 0)
        del self._rng

    def _best_split(self, X, idx, w):
        m = X.shape[1]
        order = np.arange(m) if self._k >= m else self._rng.permutation(m)
        best = None  # (impurity, feature, threshold)
        tried = 0
        for f in order:
            col = X[idx, f]
            srt = np.argsort(col, kind="stable")
            xs = col[srt]
            if xs[0] == xs[-1]:
                continue
            imp, valid = self._split_fn(xs, idx[srt], w[idx[srt]])
            tried += 1
            if valid.any():
                imp = np.where(valid, imp, np.inf)
                pos = int(np.argmin(imp))
                cand = (imp[pos], f, 0.5 * (xs[pos] + xs[pos + 1]))
                if best is None or cand[0] < best[0] - _TOL or (
                    abs(cand[0] - best[0]) <= _TOL and (cand[1], cand[2]) < (best[1], best[2])
                ):
                    best = cand
            if tried >= self._k and best is not None:
                break
        return best

    def _grow(self, X, idx, w, depth):
        node = _Node(self._leaf(idx, w))
        if (
            len(idx) < self.min_samples_split
            or (self.max_depth is not None and depth >= self.max_depth)
            or self._impurity(idx, w) <= _TOL
        ):
            return node
        best = self._best_split(X, idx, w)
        if best is None:
            return node
        _, f, thr = best
        go_left = X[idx, f] <= thr
        node.feature, node.threshold = int(f), float(thr)
        node.left = self._grow(X, idx[go_left], w, depth + 1)
        node.right = self._grow(X, idx[~go_left], w, depth + 1)
        return node

    def _leaf_values(self, X):
        return np.array([node.value for node in self.apply(X)])

    def apply(self, X):
        """Leaf identity (object id) per row; handy for leaf-wise updates."""
        if not hasattr(self, "root_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        X = check_X(X, self.n_features_in_)
        out = []
        for row in X:
            node = self.root_
            while node.left is not None:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out.append(node)
        return out

    @property
    def depth(self) -> int:
        def d(node):
            return 0 if node.left is None else 1 + max(d(node.left), d(node.right))
        return d(self.root_)


class DecisionTreeClassifier(_BaseTree, Classifier):
    def fit(self, X, y, sample_weight=None):
        X, yi = self._encode(X, y)
        w = np.ones(len(yi)) if sample_weight is None else np.asarray(sample_weight, float)
        self._onehot = np.eye(len(self.classes_))[yi]
        self._build(X, w)
        del self._onehot
        return self

    def _split_fn(self, xs, rows, ws):
        return _gini_split(xs, self._onehot[rows] * ws[:, None], ws)

    def _leaf(self, idx, w):
        counts = (self._onehot[idx] * w[idx, None]).sum(axis=0)
        return counts / counts.sum() if counts.sum() > 0 else counts

    def _impurity(self, idx, w):
        p = self._leaf(idx, w)
        return 1.0 - float((p**2).sum())

    def predict_proba(self, X):
        return self._leaf_values(X)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]


class DecisionTreeRegressor(_BaseTree, Regressor):
    def fit(self, X, y, sample_weight=None):
        X = check_X(X)
        self._y = np.asarray(y, dtype=float)
        w = np.ones(len(self._y)) if sample_weight is None else np.asarray(sample_weight, float)
        self._build(X, w)
        del self._y
        return self

    def _split_fn(self, xs, rows, ws):
        return _sse_split(xs, self._y[rows], ws)

    def _leaf(self, idx, w):
        ww = w[idx]
        return float(np.dot(ww, self._y[idx]) / ww.sum()) if ww.sum() > 0 else 0.0

    def _impurity(self, idx, w):
        yy = self._y[idx]
        return float(np.ptp(yy)) if len(yy) else 0.0

    def predict(self, X):
        return self._leaf_values(X).astype(float)
