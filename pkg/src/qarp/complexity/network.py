"""Network measures on the class-pruned epsilon-neighbourhood graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import MeasureError, arrays, distance_matrix

EPSILON = 0.15


@dataclass(frozen=True)
class EpsilonGraph:
    n_vertices: int
    edges: tuple  # (i, j) pairs with i < j
    weights: np.ndarray  # normalised distances, one per edge

    @classmethod
    def build(cls, D, y, epsilon=EPSILON, scale=None):
        """Link pairs closer than ``epsilon`` after dividing by ``scale``.

        ``scale`` defaults to the largest pairwise distance.  Edges between
        different classes are dropped.
        """
        n = len(D)
        if scale is None:
            scale = D.max() if n > 1 else 0.0
        Dn = D / scale if scale > 0 else np.zeros_like(D)
        iu, ju = np.triu_indices(n, k=1)
        keep = (Dn[iu, ju] < epsilon) & (y[iu] == y[ju])
        edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
        return cls(n, edges, Dn[iu[keep], ju[keep]])

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices))
        if self.edges:
            i, j = np.array(self.edges).T
            A[i, j] = A[j, i] = 1.0
        return A


def density(g: EpsilonGraph) -> float:
    n = g.n_vertices
    return 1.0 - 2.0 * len(g.edges) / (n * (n - 1))


def clustering(A) -> float:
    """Mean local clustering coefficient; vertices with degree < 2 count as 0."""
    deg = A.sum(axis=1)
    triangles = ((A @ A) * A).sum(axis=1) / 2.0
    possible = deg * (deg - 1) / 2.0
    local = np.divide(triangles, possible, out=np.zeros_like(deg), where=possible > 0)
    return float(local.mean())


def hub_scores(A) -> np.ndarray:
    """Principal-eigenvector hub scores, max-normalised to [0, 1].

    The all-ones vector is projected onto the eigenspace of the largest
    eigenvalue, which picks a non-negative vector even when that eigenvalue
    is repeated (disconnected components of equal spectral radius).
    """
    vals, vecs = np.linalg.eigh(A)
    top = vals[-1]
    if top <= 0:
        return np.zeros(len(A))
    V = vecs[:, np.abs(vals - top) <= 1e-9 * max(1.0, abs(top))]
    s = np.abs(V @ (V.T @ np.ones(len(A))))
    return s / s.max() if s.max() > 0 else s


def network_measures(ds, D=None, epsilon=EPSILON, scale=None) -> dict:
    X, y = arrays(ds)
    if len(y) < 3:
        raise MeasureError(f"network measures need at least 3 samples, got {len(y)}")
    if D is None:
        D = distance_matrix(X)
    g = EpsilonGraph.build(D, y, epsilon, scale)
    if not g.edges:
        return {"Density": 1.0, "ClsCoef": 1.0, "Hubs": 1.0}
    A = g.adjacency()
    return {
        "Density": density(g),
        "ClsCoef": 1.0 - clustering(A),
        "Hubs": float(1.0 - hub_scores(A).mean()),
    }
