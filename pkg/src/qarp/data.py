"""Datasets: synthetic generators, CSV ingestion, sample normalization, splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

PAD_VALUE = 0.1


class DataError(ValueError):
    """Invalid generator parameters, malformed input files or bad splits."""


@dataclass
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2:
            raise DataError(f"{self.name}: features must be a 2-D matrix")
        if len(self.labels) != len(self.features):
            raise DataError(f"{self.name}: {len(self.features)} rows but {len(self.labels)} labels")
        if not np.all(np.isfinite(self.features)):
            raise DataError(f"{self.name}: non-finite feature values")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise DataError(f"{self.name}: labels outside [0, {self.n_classes})")

    def __len__(self):
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, index, name: str | None = None) -> "Dataset":
        return Dataset(name or self.name, self.features[index], self.labels[index],
                       self.n_classes, dict(self.meta))

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    train_index: np.ndarray = field(repr=False, default=None)
    test_index: np.ndarray = field(repr=False, default=None)


def _balanced_labels(n_samples: int, n_classes: int) -> np.ndarray:
    counts = [n_samples // n_classes + (1 if c < n_samples % n_classes else 0)
              for c in range(n_classes)]
    return np.repeat(np.arange(n_classes), counts)


# ------------------------------------------------------------- generators

def gen_blobs(n_features: int, n_classes: int, n_samples: int, std: float = 0.5,
              seed: int = 0, box: float = 10.0, name: str | None = None) -> Dataset:
    """Isotropic Gaussian clusters, one per class, centers uniform in ``[-box, box]^d``.

    Centers closer than ``4 * std`` are redrawn (up to 100 attempts).
    """
    if n_features not in (2, 4) or n_classes not in (2, 3, 4):
        raise DataError(f"unsupported blobs shape: {n_features} features, {n_classes} classes")
    if std <= 0:
        raise DataError("std must be positive")
    if n_samples < n_classes:
        raise DataError("need at least one sample per class")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        centers = rng.uniform(-box, box, size=(n_classes, n_features))
        gaps = np.linalg.norm(centers[:, None] - centers[None], axis=-1)
        if gaps[np.triu_indices(n_classes, 1)].min() >= 4 * std:
            break
    else:
        raise DataError("could not place well-separated blob centers")
    y = _balanced_labels(n_samples, n_classes)
    X = centers[y] + rng.normal(scale=std, size=(n_samples, n_features))
    name = name or f"blobs-{n_features}F-{n_classes}C"
    return Dataset(name, X, y, n_classes, {"source": "blobs", "centers": centers.tolist(), "seed": seed})


def gen_circles(n_samples: int, factor: float = 0.8, seed: int = 0, noise: float = 0.05,
                name: str | None = None) -> Dataset:
    """Two concentric circles: outer radius 1 (class 0), inner radius ``factor`` (class 1)."""
    if not 0 < factor < 1:
        raise DataError("factor must lie in (0, 1)")
    if n_samples < 2:
        raise DataError("need at least two samples")
    rng = np.random.default_rng(seed)
    y = _balanced_labels(n_samples, 2)
    n_out = int((y == 0).sum())
    n_in = n_samples - n_out
    t_out = np.linspace(0, 2 * np.pi, n_out, endpoint=False)
    t_in = np.linspace(0, 2 * np.pi, n_in, endpoint=False)
    X = np.vstack([
        np.column_stack([np.cos(t_out), np.sin(t_out)]),
        factor * np.column_stack([np.cos(t_in), np.sin(t_in)]),
    ])
    if noise:
        X = X + rng.normal(scale=noise, size=X.shape)
    return Dataset(name or f"circle-factor-{factor}-2F-2C", X, y, 2,
                   {"source": "circles", "factor": factor, "noise": noise, "seed": seed})


def gen_moons(n_samples: int, seed: int = 0, noise: float = 0.05,
              name: str | None = None) -> Dataset:
    """Two interleaving half circles of unit radius."""
    if n_samples < 4:
        raise DataError("need at least four samples")
    rng = np.random.default_rng(seed)
    y = _balanced_labels(n_samples, 2)
    n_up = int((y == 0).sum())
    n_down = n_samples - n_up
    t_up = np.linspace(0, np.pi, n_up)
    t_down = np.linspace(0, np.pi, n_down)
    X = np.vstack([
        np.column_stack([np.cos(t_up), np.sin(t_up)]),
        np.column_stack([1 - np.cos(t_down), 0.5 - np.sin(t_down)]),
    ])
    if noise:
        X = X + rng.normal(scale=noise, size=X.shape)
    return Dataset(name or "moons-2F-2C", X, y, 2, {"source": "moons", "noise": noise, "seed": seed})


def gen_xor(n_samples: int, seed: int = 0, offset: float = 2.5, std: float = 0.5,
            name: str | None = None) -> Dataset:
    """Four Gaussian blobs at ``(+-offset, +-offset)``; diagonal blobs share a class."""
    if n_samples < 4:
        raise DataError("need at least four samples")
    rng = np.random.default_rng(seed)
    corners = offset * np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]], dtype=float)
    corner_class = np.array([0, 0, 1, 1])
    blob = _balanced_labels(n_samples, 4)
    X = corners[blob] + rng.normal(scale=std, size=(n_samples, 2))
    return Dataset(name or "XOR-2F-2C", X, corner_class[blob], 2,
                   {"source": "xor", "offset": offset, "std": std, "seed": seed})


# -------------------------------------------------------------------- csv

def load_csv(path, label_column: str = "label", pad_to: int | None = None,
             name: str | None = None, classes=None) -> Dataset:
    """Read a header-row CSV; the label column may hold any category strings.

    Labels are mapped to dense integers in sorted order of their (numeric when
    possible) values.  ``classes`` keeps only the listed original label values.
    ``pad_to`` appends constant ``0.1`` columns up to that width.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r}")
        li = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != li]
        rows, raw_labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
            vals = []
            for i, cell in enumerate(row):
                if i == li:
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {lineno}, column {header[i]!r}: non-numeric value {cell!r}"
                    ) from None
            rows.append(vals)
            raw_labels.append(row[li].strip())
    if not rows:
        raise DataError(f"{path}: no data rows")
    X = np.array(rows, dtype=float)
    raw = np.array(raw_labels)
    if classes is not None:
        keep = np.isin(raw, [str(c) for c in classes])
        X, raw = X[keep], raw[keep]
    uniq = sorted(set(raw), key=_label_key)
    y = np.array([uniq.index(v) for v in raw])
    ds = Dataset(name or path.stem, X, y, len(uniq),
                 {"source": str(path), "feature_names": feature_names, "label_values": uniq})
    if pad_to is not None:
        ds = pad_features(ds, pad_to)
    return ds


def _label_key(v: str):
    try:
        return (0, float(v), v)
    except ValueError:
        return (1, 0.0, v)


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    names = ds.meta.get("feature_names") or [f"x{i}" for i in range(ds.n_features)]
    if len(names) != ds.n_features:
        names = [f"x{i}" for i in range(ds.n_features)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + [label_column])
        for row, lab in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])


# --------------------------------------------------------------- transforms

def pad_features(ds: Dataset, width: int, value: float = PAD_VALUE) -> Dataset:
    """Append constant columns until ``ds`` has ``width`` features."""
    extra = width - ds.n_features
    if extra < 0:
        raise DataError(f"{ds.name}: already has {ds.n_features} > {width} features")
    if extra == 0:
        return ds
    X = np.hstack([ds.features, np.full((len(ds), extra), value)])
    meta = dict(ds.meta, padded_from=ds.n_features)
    if "feature_names" in meta:
        meta["feature_names"] = list(meta["feature_names"]) + [f"pad{i}" for i in range(extra)]
    return Dataset(ds.name, X, ds.labels, ds.n_classes, meta)


def normalize_samples(ds: Dataset) -> Dataset:
    norms = np.linalg.norm(ds.features, axis=1)
    zero = np.flatnonzero(norms == 0)
    if len(zero):
        raise DataError(f"{ds.name}: row {int(zero[0])} is all zeros and cannot be normalized")
    return Dataset(ds.name, ds.features / norms[:, None], ds.labels, ds.n_classes, dict(ds.meta))


def split(ds: Dataset, ratio: float = 0.7, seed: int = 0) -> SplitPair:
    """Unstratified random split; ``round(ratio * n)`` rows go to train."""
    if not 0 < ratio <= 1:
        raise DataError("ratio must lie in (0, 1]")
    counts = ds.class_counts()
    if np.any(counts < 2):
        bad = int(np.flatnonzero(counts < 2)[0])
        raise DataError(f"{ds.name}: class {bad} has fewer than 2 samples")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ds))
    n_train = int(math.floor(ratio * len(ds) + 0.5))
    tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    return SplitPair(ds.subset(tr), ds.subset(te), seed, tr, te)


# --------------------------------------------------------- paper datasets

REAL_DATASETS = {
    # name -> (file, label column, kept classes)
    "PIMA-8F-2C": ("pima.csv", "label", None),
    "Iris": ("iris.csv", "label", None),
    "Haberman": ("haberman.csv", "label", None),
    "Banknote": ("banknote.csv", "label", None),
}

SYNTHETIC_NAMES = (
    "blobs-2F-2C", "blobs-2F-3C", "blobs-2F-4C",
    "blobs-4F-2C", "blobs-4F-3C", "blobs-4F-4C",
    "circle-factor-0.5-2F-2C", "circle-factor-default-2F-2C",
    "moons-2F-2C", "XOR-2F-2C",
)
PAPER_DATASETS = SYNTHETIC_NAMES + tuple(REAL_DATASETS)


def real_data_dir() -> Path:
    return Path(str(resources.files("qarp") / "datasets"))


def make_dataset(name: str, seed: int = 0, data_dir=None, n_samples: int | None = None) -> Dataset:
    """Build one of the fourteen benchmark datasets by its table name.

    ``n_samples`` overrides the benchmark size of a synthetic dataset.
    """
    if name.startswith("blobs-"):
        f, c = name[len("blobs-"):].split("-")
        return gen_blobs(int(f[:-1]), int(c[:-1]), n_samples or 1000, 0.5, seed, name=name)
    if name == "circle-factor-0.5-2F-2C":
        return gen_circles(n_samples or 100, 0.5, seed, name=name)
    if name == "circle-factor-default-2F-2C":
        return gen_circles(n_samples or 100, 0.8, seed, name=name)
    if name == "moons-2F-2C":
        return gen_moons(n_samples or 100, seed, name=name)
    if name == "XOR-2F-2C":
        return gen_xor(n_samples or 2000, seed, name=name)
    if name in REAL_DATASETS:
        if n_samples is not None:
            raise DataError(f"{name} is a fixed real dataset; n_samples does not apply")
        fname, col, classes = REAL_DATASETS[name]
        base = Path(data_dir) if data_dir else real_data_dir()
        return load_csv(base / fname, col, name=name, classes=classes)
    raise DataError(f"unknown dataset {name!r}")


def circuit_ready(ds: Dataset, n_qubits: int | None = None, min_qubits: int = 1) -> Dataset:
    """Sample-normalize, then pad with 0.1 columns up to ``2**n_qubits`` features."""
    from .qsim import qubit_count

    if n_qubits is None:
        n_qubits = qubit_count(ds.n_features, min_qubits)
    out = pad_features(normalize_samples(ds), 2**n_qubits)
    out.meta["n_qubits"] = n_qubits
    out.meta["raw_features"] = ds.n_features
    return out
