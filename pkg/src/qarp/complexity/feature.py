"""Feature-overlap measures F1, F1v, F2, F3, F4."""

from __future__ import annotations

import numpy as np

from ._common import arrays, class_pairs, require_classes


def fisher_ratios(X, y) -> np.ndarray:
    """Per-feature Fisher discriminant ratio (between- over within-class scatter)."""
    mu = X.mean(axis=0)
    between = np.zeros(X.shape[1])
    within = np.zeros(X.shape[1])
    for c in np.unique(y):
        Xc = X[y == c]
        mc = Xc.mean(axis=0)
        between += len(Xc) * (mc - mu) ** 2
        within += ((Xc - mc) ** 2).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = between / within
    r[(within == 0) & (between == 0)] = 0.0
    r[(within == 0) & (between > 0)] = np.inf
    return r


def f1(X, y) -> float:
    return float(1.0 / (1.0 + fisher_ratios(X, y).max()))


def _directional_fisher(Xa, Xb) -> float:
    na, nb = len(Xa), len(Xb)
    ma, mb = Xa.mean(axis=0), Xb.mean(axis=0)
    diff = ma - mb
    if not np.any(diff):
        return 0.0

    def cov(Z):
        return np.atleast_2d(np.cov(Z, rowvar=False)) if len(Z) > 1 else np.zeros((Z.shape[1],) * 2)

    W = (na * cov(Xa) + nb * cov(Xb)) / (na + nb)
    d = np.linalg.pinv(W) @ diff
    num = (d @ diff) ** 2
    den = d @ W @ d
    if den <= 1e-300:
        # singular within-class scatter along the best direction
        if not np.any(d):
            d = diff
            den = d @ W @ d
            num = (d @ diff) ** 2
        if den <= 1e-300:
            return np.inf
    return float(num / den)


def f1v(X, y) -> float:
    vals = []
    for a, b in class_pairs(y):
        dF = _directional_fisher(X[y == a], X[y == b])
        vals.append(1.0 / (1.0 + dF))
    return float(np.mean(vals))


def _overlap_bounds(Xa, Xb):
    """Per-feature (maxmin, minmax, minmin, maxmax) for two classes."""
    maxmin = np.maximum(Xa.min(axis=0), Xb.min(axis=0))
    minmax = np.minimum(Xa.max(axis=0), Xb.max(axis=0))
    minmin = np.minimum(Xa.min(axis=0), Xb.min(axis=0))
    maxmax = np.maximum(Xa.max(axis=0), Xb.max(axis=0))
    return maxmin, minmax, minmin, maxmax


def f2(X, y) -> float:
    vals = []
    for a, b in class_pairs(y):
        maxmin, minmax, minmin, maxmax = _overlap_bounds(X[y == a], X[y == b])
        span = maxmax - minmin
        overlap = np.maximum(0.0, minmax - maxmin)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(span > 0, overlap / span, 1.0)
        vals.append(float(np.prod(ratio)))
    return float(np.mean(vals))


def _in_overlap(Xp, maxmin, minmax):
    """Boolean (rows, features): point lies inside the feature's overlap interval."""
    return (Xp >= maxmin) & (Xp <= minmax) & (minmax >= maxmin)


def f3(X, y) -> float:
    vals = []
    for a, b in class_pairs(y):
        Xa, Xb = X[y == a], X[y == b]
        maxmin, minmax, _, _ = _overlap_bounds(Xa, Xb)
        Xp = np.vstack([Xa, Xb])
        counts = _in_overlap(Xp, maxmin, minmax).sum(axis=0)
        vals.append(counts.min() / len(Xp))
    return float(np.mean(vals))


def f4(X, y) -> float:
    vals = []
    for a, b in class_pairs(y):
        Xp = np.vstack([X[y == a], X[y == b]])
        yp = np.r_[np.zeros((y == a).sum(), int), np.ones((y == b).sum(), int)]
        n = len(Xp)
        features = list(range(X.shape[1]))
        while features and len(Xp):
            if len(np.unique(yp)) < 2:
                Xp = Xp[:0]
                break
            Xa, Xb = Xp[yp == 0][:, features], Xp[yp == 1][:, features]
            maxmin, minmax, _, _ = _overlap_bounds(Xa, Xb)
            inside = _in_overlap(Xp[:, features], maxmin, minmax)
            k = int(np.argmin(inside.sum(axis=0)))
            keep = inside[:, k]
            Xp, yp = Xp[keep], yp[keep]
            features.pop(k)
        vals.append(len(Xp) / n)
    return float(np.mean(vals))


def feature_measures(ds) -> dict:
    X, y = arrays(ds)
    require_classes(y, min_per_class=1)
    return {"F1": f1(X, y), "F1v": f1v(X, y), "F2": f2(X, y), "F3": f3(X, y), "F4": f4(X, y)}
