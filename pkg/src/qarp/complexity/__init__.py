"""Data-complexity measures, all oriented so that larger means harder."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, split
from ._common import MeasureError, arrays, distance_matrix
from .balance import balance_measures
from .dimensionality import dimensionality_measures
from .feature import feature_measures
from .linearity import linearity_measures
from .neighborhood import neighborhood_measures, prim_mst
from .network import EpsilonGraph, network_measures

MEASURE_NAMES = (
    "F1", "F1v", "F2", "F3", "F4",
    "L1", "L2", "L3",
    "N1", "N2", "N3", "N4", "T1", "LSC",
    "Density", "ClsCoef", "Hubs",
    "T2", "T3", "T4",
    "C1", "C2",
)

UNBOUNDED = ("L1", "T2", "T3")


def compute_all(ds: Dataset, seed: int = 0) -> dict:
    """All 22 measures on one dataset, sharing a single distance matrix."""
    X, y = arrays(ds)
    D = distance_matrix(X)
    out = {}
    out.update(feature_measures(ds))
    out.update(linearity_measures(ds, seed=seed))
    out.update(neighborhood_measures(ds, seed=seed, D=D))
    out.update(network_measures(ds, D=D))
    out.update(dimensionality_measures(ds))
    out.update(balance_measures(ds))
    return {k: out[k] for k in MEASURE_NAMES}


@dataclass
class ComplexityProfile:
    values: dict
    n_splits_averaged: int
    per_split: list = field(default_factory=list, repr=False)

    def __getitem__(self, name):
        return self.values[name]

    def vector(self, names=MEASURE_NAMES) -> np.ndarray:
        return np.array([self.values[k] for k in names])

    def to_csv(self, path, extra=None) -> None:
        extra = dict(extra or {})
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(extra) + list(MEASURE_NAMES) + ["n_splits_averaged"])
            w.writerow(list(extra.values()) + [repr(self.values[k]) for k in MEASURE_NAMES]
                       + [self.n_splits_averaged])


def split_seeds(seed: int, n_splits: int) -> list[int]:
    return [seed * 1000 + i for i in range(n_splits)]


def profile(ds: Dataset, n_splits: int = 10, ratio: float = 0.7, seed: int = 0) -> ComplexityProfile:
    """Mean of every measure over ``n_splits`` random training subsets."""
    rows = []
    for i, s in enumerate(split_seeds(seed, n_splits)):
        train = split(ds, ratio, s).train
        try:
            rows.append(compute_all(train, seed=s))
        except MeasureError as exc:
            raise MeasureError(f"split {i} (seed {s}): {exc}") from exc
    values = {k: float(np.mean([r[k] for r in rows])) for k in MEASURE_NAMES}
    return ComplexityProfile(values, n_splits, rows)


__all__ = [
    "MEASURE_NAMES", "MeasureError", "ComplexityProfile", "EpsilonGraph", "compute_all", "profile",
    "feature_measures", "linearity_measures", "neighborhood_measures", "network_measures",
    "dimensionality_measures", "balance_measures", "prim_mst", "split_seeds",
]
