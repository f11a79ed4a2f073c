from __future__ import annotations

import zlib
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

# floor for a zero nearest-enemy distance (duplicate points with different labels)
ENEMY_EPS = 1e-12


class MeasureError(ValueError):
    """A complexity measure is undefined for the given data."""


def arrays(ds):
    """(X, y) from a Dataset or an ``(X, y)`` tuple, labels re-indexed densely."""
    if isinstance(ds, tuple):
        X, y = ds
    else:
        X, y = ds.features, ds.labels
    X = np.asarray(X, dtype=float)
    _, y = np.unique(np.asarray(y), return_inverse=True)
    return X, y


def require_classes(y, min_per_class=1, min_classes=2):
    counts = np.bincount(y)
    if len(counts) < min_classes:
        raise MeasureError(f"need at least {min_classes} classes, got {len(counts)}")
    if counts.min() < min_per_class:
        raise MeasureError(f"every class needs at least {min_per_class} samples")
    return counts


def class_pairs(y):
    return list(combinations(range(int(y.max()) + 1), 2))


def distance_matrix(X) -> np.ndarray:
    return cdist(X, X)


def nearest_enemy(D, y) -> np.ndarray:
    enemy = y[:, None] != y[None, :]
    ne = np.where(enemy, D, np.inf).min(axis=1)
    return np.maximum(ne, ENEMY_EPS)


def interpolate_within_classes(X, y, seed=0):
    """One synthetic point per sample, each a random convex mix of two same-class points.

    Each class draws from its own generator keyed by a hash of its sorted
    rows, so the result does not depend on row order or on label names.
    """
    pts, labs = [], []
    for c in np.unique(y):
        Xc = X[y == c]
        Xc = Xc[np.lexsort(Xc.T[::-1])]
        rng = np.random.default_rng([seed, zlib.crc32(np.ascontiguousarray(Xc).tobytes())])
        i = rng.integers(0, len(Xc), len(Xc))
        j = rng.integers(0, len(Xc), len(Xc))
        lam = rng.uniform(0.0, 1.0, len(Xc))[:, None]
        pts.append(lam * Xc[i] + (1 - lam) * Xc[j])
        labs.append(np.full(len(Xc), c))
    return np.vstack(pts), np.concatenate(labs)
