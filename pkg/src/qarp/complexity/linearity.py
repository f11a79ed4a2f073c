"""Linearity measures L1, L2, L3 from a hinge-loss linear classifier per class pair."""

from __future__ import annotations

import numpy as np

from ..ml.linear import train_binary_hinge
from ._common import arrays, class_pairs, interpolate_within_classes, require_classes


def _pair_scores(Xp, yp, seed):
    """(L1, L2, L3) for one two-class problem with labels 0/1."""
    y_pm = np.where(yp == 1, 1.0, -1.0)
    w, b = train_binary_hinge(Xp, y_pm)
    f = Xp @ w + b
    wrong = np.where(f >= 0, 1.0, -1.0) != y_pm
    norm = np.linalg.norm(w)
    if not wrong.any():
        l1 = 0.0
    elif norm == 0:
        l1 = 1.0
    else:
        total = np.abs(f[wrong]).sum() / norm / len(Xp)
        l1 = total / (1.0 + total)
    l2 = float(wrong.mean())
    Xi, yi = interpolate_within_classes(Xp, yp, seed)
    fi = Xi @ w + b
    l3 = float(np.mean(np.where(fi >= 0, 1, 0) != yi))
    return l1, l2, l3


def linearity_measures(ds, seed: int = 0) -> dict:
    X, y = arrays(ds)
    require_classes(y, min_per_class=1)
    rows = []
    for a, b in class_pairs(y):
        mask = (y == a) | (y == b)
        rows.append(_pair_scores(X[mask], (y[mask] == b).astype(int), seed))
    l1, l2, l3 = np.mean(rows, axis=0)
    return {"L1": float(l1), "L2": float(l2), "L3": float(l3)}
