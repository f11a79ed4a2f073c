from __future__ import annotations

import numpy as np

from ._common import MeasureError, arrays

VARIANCE_TARGET = 0.95


def pca_components(X, target=VARIANCE_TARGET) -> int:
    """Smallest number of principal components whose variance share reaches ``target``."""
    Xc = X - X.mean(axis=0)
    var = np.linalg.svd(Xc, compute_uv=False) ** 2
    total = var.sum()
    if total <= 1e-24 * max(1.0, len(X)):
        return 0
    share = np.cumsum(var) / total
    return int(np.searchsorted(share, target - 1e-12) + 1)


def dimensionality_measures(ds) -> dict:
    X, _ = arrays(ds)
    n, m = X.shape
    if n < 2:
        raise MeasureError(f"dimensionality measures need at least 2 samples, got {n}")
    k = pca_components(X)
    return {"T2": m / n, "T3": k / n, "T4": k / m}
