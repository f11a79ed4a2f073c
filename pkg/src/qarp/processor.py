"""Recommendation processor: meta-tables, Tasks 1-A / 1-B / 2, single-measure scans.

The meta-data of one dataset is its complexity profile (features) and the
per-kind best accuracy and best layer count from a circuit sweep (targets).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import ml
from .complexity import MEASURE_NAMES
from .qsim import LAYER_COUNTS, LAYER_KINDS, params_per_layer

TIE_TOL = 1e-4
ALL = "ALL"
TASKS = ("1-A", "1-B", "2")
HOLDOUT = {"1-A": 1, "1-B": 2, "2": 1}

# classifiers and regressors of the paper's model table that are built here
TASK1_MODELS = tuple(ml.CLASSIFIERS)
TASK2_MODELS = tuple(ml.REGRESSORS)


class DerivationError(ValueError):
    """The sweep tables do not support target derivation."""


class RecommendationError(ValueError):
    """recommend() got an input it cannot act on."""


# ------------------------------------------------------------------ targets


def infer_qubits(row: dict) -> int:
    """Fallback qubit count when only the tables are known: two-wire kinds imply >= 2."""
    return 2 if ("Circular" in row or "Full" in row) else 1


def simplest(kinds, n_qubits: int) -> str:
    """Fewest parameters per layer; ties follow the kind order."""
    return min(kinds, key=lambda k: (params_per_layer(k, n_qubits), LAYER_KINDS.index(k)))


@dataclass
class Targets:
    tied: dict  # dataset -> [kinds] tied for best accuracy
    task1a: dict  # dataset -> kind
    task1b: list  # [(dataset, kind)]
    task2: dict  # dataset -> layer count


def derive_targets(accuracy_table: dict, layers_table: dict, n_qubits: dict | None = None,
                   tol: float = TIE_TOL) -> Targets:
    """Best-circuit labels and layer-count targets from sweep summary tables.

    Kinds whose mean accuracy is within ``tol`` of the row maximum are tied.
    Task 2's target is the largest best-layer count among the tied kinds, so a
    recommended depth is never below what any of the best circuits needed.
    """
    tied, t1a, t1b, t2 = {}, {}, [], {}
    for name, row in accuracy_table.items():
        if not row:
            raise DerivationError(f"{name}: no accuracy cells")
        lay = layers_table.get(name)
        if lay is None:
            raise DerivationError(f"{name}: missing from the layers table")
        best = max(row.values())
        kinds = [k for k in LAYER_KINDS if k in row and row[k] >= best - tol]
        missing = [k for k in kinds if k not in lay]
        if missing:
            raise DerivationError(f"{name}: no layer count for {', '.join(missing)}")
        nq = (n_qubits or {}).get(name) or infer_qubits(row)
        tied[name] = kinds
        t1a[name] = simplest(kinds, nq)
        t1b.extend((name, k) for k in kinds)
        t2[name] = max(int(lay[k]) for k in kinds)
    return Targets(tied, t1a, t1b, t2)


# ------------------------------------------------------------------- tables


@dataclass
class RecommendationTable:
    task: str
    datasets: list  # one entry per row
    features: np.ndarray  # (rows, 22) in MEASURE_NAMES order
    target: np.ndarray
    accepted: list  # per row, the set of targets counted as correct

    def columns(self, feature_set: str = ALL) -> np.ndarray:
        if feature_set == ALL:
            return self.features
        if feature_set not in MEASURE_NAMES:
            raise KeyError(f"unknown complexity measure {feature_set!r}")
        return self.features[:, [MEASURE_NAMES.index(feature_set)]]

    def __len__(self):
        return len(self.datasets)


def build_tables(profiles: dict, targets: Targets) -> dict:
    """Meta-tables for the three tasks; ``profiles`` maps dataset -> {measure: value}."""
    names = list(targets.task1a)
    for n in names:
        if n not in profiles:
            raise DerivationError(f"{n}: no complexity profile")

    def feats(rows):
        return np.array([[float(profiles[n][m]) for m in MEASURE_NAMES] for n in rows], dtype=float)

    rows_b = [d for d, _ in targets.task1b]
    return {
        "1-A": RecommendationTable("1-A", names, feats(names),
                                   np.array([targets.task1a[n] for n in names]),
                                   [frozenset([targets.task1a[n]]) for n in names]),
        "1-B": RecommendationTable("1-B", rows_b, feats(rows_b),
                                   np.array([k for _, k in targets.task1b]),
                                   [frozenset(targets.tied[d]) for d in rows_b]),
        "2": RecommendationTable("2", names, feats(names),
                                 np.array([targets.task2[n] for n in names], dtype=float),
                                 [frozenset([targets.task2[n]]) for n in names]),
    }


# -------------------------------------------------------------------- tasks


@dataclass
class TaskRow:
    task: str
    model: str
    feature_set: str
    trials: np.ndarray  # accuracy (Task 1) or absolute error (Task 2) per trial
    row_accuracy: np.ndarray | None = None  # Task 1-B: plain label accuracy, for reference

    @property
    def stats(self):
        t = self.trials
        return float(t.mean()), float(t.std()), float(t.min()), float(t.max())


@dataclass
class TaskReport:
    task: str
    rows: list = field(default_factory=list)

    def add(self, row: TaskRow):
        self.rows.append(row)

    def get(self, model, feature_set=ALL) -> TaskRow:
        for r in self.rows:
            if r.model == model and r.feature_set == feature_set:
                return r
        raise KeyError((model, feature_set))

    def best(self) -> TaskRow:
        """Highest mean accuracy (Task 1) or lowest MAE (Task 2); first listed wins ties."""
        if self.task == "2":
            return min(self.rows, key=lambda r: r.stats[0])
        return max(self.rows, key=lambda r: r.stats[0])

    def write(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            metric = "mae" if self.task == "2" else "accuracy"
            w.writerow(["task", "model", "features", f"mean_{metric}", "std", "min", "max",
                        "row_accuracy", "trials"])
            for r in self.rows:
                mean, std, lo, hi = r.stats
                plain = "" if r.row_accuracy is None else repr(float(r.row_accuracy.mean()))
                w.writerow([self.task, r.model, r.feature_set, repr(mean), repr(std), repr(lo), repr(hi),
                            plain, " ".join(repr(float(v)) for v in r.trials)])


def read_report(path) -> TaskReport:
    """Inverse of :meth:`TaskReport.write`."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    rep = TaskReport(rows[0]["task"] if rows else "1-A")
    for r in rows:
        plain = np.array([float(r["row_accuracy"])]) if r["row_accuracy"] else None
        rep.add(TaskRow(r["task"], r["model"], r["features"],
                        np.array([float(v) for v in r["trials"].split()]), plain))
    return rep


def holdouts(n_rows: int, size: int, trials: int, seed: int, task: str = "1-A") -> list[np.ndarray]:
    """Test-row indices per trial; each task draws from its own stream for a given seed."""
    rng = np.random.default_rng([seed, TASKS.index(task)])
    return [np.sort(rng.choice(n_rows, size=size, replace=False)) for _ in range(trials)]


def _run(table: RecommendationTable, model_kind: str, feature_set: str, trials: int, seed: int) -> TaskRow:
    task = table.task
    X = table.columns(feature_set)
    size = HOLDOUT[task]
    if len(table) <= size:
        raise DerivationError(f"task {task}: {len(table)} rows cannot spare {size} for testing")
    scores, plain = [], []
    kind = "regression" if task == "2" else "classification"
    for t, test in enumerate(holdouts(len(table), size, trials, seed, task)):
        train = np.setdiff1d(np.arange(len(table)), test)
        model = ml.make_learner(model_kind, kind, seed=t).fit(X[train], table.target[train])
        pred = model.predict(X[test])
        if task == "2":
            scores.append(float(np.mean(np.abs(pred - table.target[test]))))
        else:
            scores.append(float(np.mean([p in table.accepted[i] for p, i in zip(pred, test)])))
            plain.append(float(np.mean(pred == table.target[test])))
    return TaskRow(task, model_kind, feature_set, np.array(scores),
                   np.array(plain) if task == "1-B" else None)


def run_task1(table: RecommendationTable, model_kind: str, feature_set: str = ALL,
              trials: int = 30, seed: int = 0) -> TaskRow:
    """Repeated hold-out evaluation of a circuit-label classifier.

    Task 1-A holds out one row of the one-label-per-dataset table; Task 1-B
    holds out two rows of the table with one row per tied-best circuit, and a
    prediction counts as correct when it names any tied-best circuit of the
    held-out row's dataset.
    """
    if table.task not in ("1-A", "1-B"):
        raise ValueError(f"run_task1 needs a Task 1 table, got {table.task}")
    return _run(table, model_kind, feature_set, trials, seed)


def run_task2(table: RecommendationTable, model_kind: str, feature_set: str = ALL,
              trials: int = 30, seed: int = 0) -> TaskRow:
    """Repeated leave-one-row-out absolute error of a layer-count regressor."""
    if table.task != "2":
        raise ValueError(f"run_task2 needs the Task 2 table, got {table.task}")
    return _run(table, model_kind, feature_set, trials, seed)


def run_task(table, model_kind, feature_set=ALL, trials=30, seed=0) -> TaskRow:
    if table.task == "2":
        return run_task2(table, model_kind, feature_set, trials, seed)
    return run_task1(table, model_kind, feature_set, trials, seed)


def task_report(table, models=None, feature_set=ALL, trials=30, seed=0) -> TaskReport:
    models = models or (TASK2_MODELS if table.task == "2" else TASK1_MODELS)
    rep = TaskReport(table.task)
    for m in models:
        rep.add(run_task(table, m, feature_set, trials, seed))
    return rep


@dataclass
class ScanResult:
    task: str
    cells: dict  # (measure, model) -> TaskRow | error string

    def ranking(self):
        ok = [(k, v) for k, v in self.cells.items() if isinstance(v, TaskRow)]
        sign = 1 if self.task == "2" else -1
        return sorted(ok, key=lambda kv: (sign * kv[1].stats[0],
                                          MEASURE_NAMES.index(kv[0][0])))

    def best(self):
        return self.ranking()[0]

    def write(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["task", "measure", "model", "mean", "std", "min", "max", "error"])
            for (meas, model), v in self.cells.items():
                if isinstance(v, TaskRow):
                    w.writerow([self.task, meas, model] + [repr(x) for x in v.stats] + [""])
                else:
                    w.writerow([self.task, meas, model, "", "", "", "", v])


def scan_single_measures(table: RecommendationTable, models=None, trials: int = 30,
                         seed: int = 0) -> ScanResult:
    """Every (single measure, model) pair; failures are kept as messages."""
    models = models or (TASK2_MODELS if table.task == "2" else TASK1_MODELS)
    cells = {}
    for meas in MEASURE_NAMES:
        for m in models:
            try:
                cells[(meas, m)] = run_task(table, m, meas, trials, seed)
            except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
                cells[(meas, m)] = f"{type(exc).__name__}: {exc}"
    return ScanResult(table.task, cells)


# ---------------------------------------------------------------- recommend


def round_up_layers(pred: float, grid=LAYER_COUNTS) -> int:
    """Smallest grid value >= ``pred``; predictions beyond the grid are rejected."""
    if not math.isfinite(pred):
        raise RecommendationError(f"layer prediction {pred} is not finite")
    for g in sorted(grid):
        if g >= pred - 1e-9:
            return int(g)
    raise RecommendationError(f"layer prediction {pred:.3f} exceeds the largest count {max(grid)}")


@dataclass
class Recommender:
    """Circuit classifier (Task 1-B table) plus layer-count regressor (Task 2 table)."""

    classifier: str = "DT"
    classifier_features: str = "T2"
    regressor: str = "Adaboost"
    regressor_features: str = "N2"
    seed: int = 0
    _clf: object = field(default=None, repr=False)
    _reg: object = field(default=None, repr=False)

    def fit(self, tables: dict) -> "Recommender":
        t1, t2 = tables["1-B"], tables["2"]
        self._clf = ml.make_learner(self.classifier, "classification", self.seed).fit(
            t1.columns(self.classifier_features), t1.target)
        self._reg = ml.make_learner(self.regressor, "regression", self.seed).fit(
            t2.columns(self.regressor_features), t2.target)
        return self

    def raw_layers(self, profile) -> float:
        return float(self._reg.predict(_profile_row(profile, self.regressor_features))[0])

    def recommend(self, profile) -> dict:
        if self._clf is None or self._reg is None:
            raise RecommendationError("recommender is not fitted")
        kind = str(self._clf.predict(_profile_row(profile, self.classifier_features))[0])
        return {"layer_kind": kind, "n_layers": round_up_layers(self.raw_layers(profile))}


def _profile_row(profile, feature_set):
    values = profile if isinstance(profile, dict) else profile.values
    missing = [m for m in MEASURE_NAMES if m not in values]
    if missing:
        raise RecommendationError(f"profile lacks {', '.join(missing)}")
    v = np.array([float(values[m]) for m in MEASURE_NAMES])
    if not np.all(np.isfinite(v)):
        raise RecommendationError("profile has non-finite values")
    if values["C1"] >= 1.0 and values["C2"] == 0.0:
        raise RecommendationError("profile describes a single-class dataset")
    if feature_set == ALL:
        return v[None, :]
    return v[None, [MEASURE_NAMES.index(feature_set)]]


def recommend(profile, recommender: Recommender) -> dict:
    """``{"layer_kind", "n_layers"}`` for one complexity profile."""
    return recommender.recommend(profile)
