"""Neighbourhood measures N1-N4, T1 and LSC on Euclidean distances."""

from __future__ import annotations

import numpy as np

from ._common import (
    arrays,
    distance_matrix,
    interpolate_within_classes,
    nearest_enemy,
    require_classes,
)


def prim_mst(D) -> np.ndarray:
    """Edges (k, 2) of a minimum spanning tree of the dense distance matrix ``D``.

    Zero-length edges (duplicate points) are kept; sparse-graph routines
    would treat them as missing.
    """
    n = len(D)
    if n < 2:
        return np.zeros((0, 2), dtype=int)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = D[0].astype(float).copy()
    parent = np.zeros(n, dtype=int)
    edges = np.empty((n - 1, 2), dtype=int)
    for k in range(n - 1):
        j = int(np.argmin(np.where(in_tree, np.inf, best)))
        edges[k] = parent[j], j
        in_tree[j] = True
        closer = D[j] < best
        best[closer] = D[j][closer]
        parent[closer] = j
    return edges


def n1(D, y) -> float:
    edges = prim_mst(D)
    cross = edges[y[edges[:, 0]] != y[edges[:, 1]]]
    return len(np.unique(cross)) / len(y)


def n2(D, y) -> float:
    same = y[:, None] == y[None, :]
    off_diag = ~np.eye(len(y), dtype=bool)
    intra = np.where(same & off_diag, D, np.inf).min(axis=1)
    extra = nearest_enemy(D, y)
    rho = intra.sum() / extra.sum()
    return float(rho / (1.0 + rho))


def nearest_neighbor(D, exclude_self=True) -> np.ndarray:
    """Index of the nearest other point; ties go to the lowest index."""
    Dm = D.copy()
    if exclude_self:
        np.fill_diagonal(Dm, np.inf)
    return np.argmin(Dm, axis=1)


def n3(D, y) -> float:
    return float(np.mean(y[nearest_neighbor(D)] != y))


def n4(X, y, seed=0) -> float:
    from scipy.spatial.distance import cdist

    Xi, yi = interpolate_within_classes(X, y, seed)
    nn = np.argmin(cdist(Xi, X), axis=1)
    return float(np.mean(y[nn] != yi))


def t1(D, y) -> float:
    """Fraction of adherence subsets left after dropping those contained in another.

    The subset of x_i holds every point closer to x_i than its nearest enemy
    (so only same-class points, x_i included).  A subset equal to another is
    kept only for the sphere with the larger radius, ties by lowest index.
    """
    radius = nearest_enemy(D, y)
    S = (D < radius[:, None]).astype(np.float32)
    size = S.sum(axis=1)
    common = S @ S.T  # exact: integer counts well below 2**24
    sub = common == size[:, None]  # sub[j, i]: S_j within S_i
    rank = np.empty(len(y), dtype=int)
    rank[np.argsort(-radius, kind="stable")] = np.arange(len(y))
    equal = sub & sub.T
    beats = sub & (~equal | (rank[None, :] < rank[:, None]))
    np.fill_diagonal(beats, False)
    return float(np.mean(~beats.any(axis=1)))


def lsc(D, y) -> float:
    ne = nearest_enemy(D, y)
    ls = (D < ne[:, None]).sum(axis=1)
    return float(1.0 - ls.sum() / len(y) ** 2)


def neighborhood_measures(ds, seed: int = 0, D=None) -> dict:
    X, y = arrays(ds)
    require_classes(y, min_per_class=2)
    if D is None:
        D = distance_matrix(X)
    return {
        "N1": n1(D, y), "N2": n2(D, y), "N3": n3(D, y), "N4": n4(X, y, seed),
        "T1": t1(D, y), "LSC": lsc(D, y),
    }
