from __future__ import annotations

import numpy as np


def balance_measures(ds, n_classes=None) -> dict:
    """Class-entropy (C1) and imbalance-ratio (C2) measures.

    ``n_classes`` defaults to ``ds.n_classes`` so that a class missing from a
    training split still counts as imbalance.
    """
    y = np.asarray(ds[1] if isinstance(ds, tuple) else ds.labels)
    if n_classes is None:
        n_classes = getattr(ds, "n_classes", None) or len(np.unique(y))
    _, counts = np.unique(y, return_counts=True)
    counts = np.r_[counts, np.zeros(max(0, n_classes - len(counts)))]
    if n_classes < 2:
        return {"C1": 1.0, "C2": 0.0}
    n = counts.sum()
    p = counts[counts > 0] / n
    entropy = -(p * np.log(p)).sum()
    c1 = 1.0 - entropy / np.log(n_classes)
    if counts.max() == n:
        # one class holds every sample: infinite imbalance ratio
        return {"C1": float(max(c1, 0.0)), "C2": 1.0}
    ir = (n_classes - 1) / n_classes * np.sum(counts / (n - counts))
    c2 = 1.0 - 1.0 / ir
    return {"C1": float(max(c1, 0.0)), "C2": float(max(c2, 0.0))}
