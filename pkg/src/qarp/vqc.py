"""One-vs-all variational circuit classifiers trained with a multiclass margin loss.

Each class owns one circuit (one row of ``theta``); its score is ``<Z>`` on
wire 0 and the prediction is the argmax over classes.  Training runs the
repetitions of one (dataset, layer kind, layer count) cell in lockstep: the
repetition axis is just another batch axis of the simulator.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _fastsim
from .data import Dataset, circuit_ready, split
from .qsim import (
    LAYER_COUNTS,
    LAYER_KINDS,
    CircuitSpec,
    expectation_vjp,
    expectation_z,
    run_circuit,
)

TABLE_COLUMNS = {
    "C1": "Layer C-1", "C2": "Layer C-2", "C3": "Layer C-3",
    "ZZFM": "Layer ZZFM", "Circular": "Layer Circular", "Full": "Layer FULL",
}
MISSING = "-"
# scores this close to the maximum count as tied; ties go to the lowest class
TIE_TOL = 1e-12


class TrainingError(RuntimeError):
    """Raised when the loss stops being finite."""


@dataclass(frozen=True)
class Hyperparams:
    margin: float = 0.15
    batch_size: int = 10
    learning_rate: float = 0.01
    max_epochs: int = 100
    repetitions: int = 10
    split_ratio: float = 0.7

    def __post_init__(self):
        for name in ("margin", "batch_size", "learning_rate", "max_epochs", "repetitions", "split_ratio"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.margin >= 1:
            raise ValueError(f"margin must be < 1, got {self.margin}")
        if self.split_ratio >= 1:
            raise ValueError(f"split_ratio must be < 1, got {self.split_ratio}")


@dataclass
class QuantumClassifier:
    spec: CircuitSpec
    theta: np.ndarray  # (n_classes, n_params)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.theta.ndim != 2 or self.theta.shape[1] != self.spec.n_params:
            raise ValueError(
                f"theta must have shape (n_classes, {self.spec.n_params}), got {self.theta.shape}"
            )
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("theta contains non-finite values")

    @property
    def class_count(self) -> int:
        return self.theta.shape[0]

    @classmethod
    def random(cls, spec: CircuitSpec, n_classes: int, seed=None) -> "QuantumClassifier":
        rng = np.random.default_rng(seed)
        return cls(spec, rng.uniform(0.0, 2 * np.pi, (n_classes, spec.n_params)))

    def predict(self, X) -> np.ndarray:
        return predict_from_scores(scores(self, X), axis=-1)


def predict_from_scores(S, axis=-1) -> np.ndarray:
    """Argmax over ``axis`` with near-ties resolved to the lowest class index.

    Identical class circuits can differ by rounding noise only; a plain
    argmax would then pick a class at random.
    """
    S = np.asarray(S)
    return np.argmax(S >= S.max(axis=axis, keepdims=True) - TIE_TOL, axis=axis)


def scores(model: QuantumClassifier, x) -> np.ndarray:
    """Class scores ``<Z_0>``; shape ``(n_classes,)`` for one sample, ``(B, n_classes)`` for a batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None] if single else x
    s = run_circuit(model.spec, model.theta[:, None, :], X)
    out = np.moveaxis(expectation_z(s), 0, -1)  # (B, C)
    return out[0] if single else out


def margin_loss(scores, y, margin: float = 0.15) -> float:
    """Multiclass hinge: sum over wrong classes of ``max(0, margin - s_y + s_j)``, batch-averaged."""
    S = np.atleast_2d(np.asarray(scores, dtype=float))
    y = np.atleast_1d(np.asarray(y))
    if np.any(y >= S.shape[-1]) or np.any(y < 0):
        raise ValueError("label outside the score vector")
    sy = np.take_along_axis(S, y[:, None], axis=1)
    h = np.maximum(0.0, margin - sy + S)
    h[np.arange(len(y)), y] = 0.0
    return float(h.sum(axis=1).mean())


def _loss_and_cotangent(S, y, margin):
    """Per-repetition batch loss and d loss / d S.

    ``S`` has shape ``(..., C, B)`` and ``y`` shape ``(..., B)``.
    """
    C, B = S.shape[-2], S.shape[-1]
    onehot = np.arange(C)[:, None] == y[..., None, :]  # (..., C, B)
    sy = np.sum(np.where(onehot, S, 0.0), axis=-2, keepdims=True)
    h = margin - sy + S
    active = (h > 0) & ~onehot
    loss = np.sum(np.where(active, h, 0.0), axis=(-2, -1)) / B
    cot = active / B
    cot = cot - onehot * cot.sum(axis=-2, keepdims=True)
    return loss, cot


def gradient(model: QuantumClassifier, X, y, margin: float = 0.15, method: str = "adjoint",
             step: float = 1e-4) -> np.ndarray:
    """d(batch loss)/d theta, by the adjoint method or by central finite differences."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y))
    if len(X) == 0:
        raise ValueError("empty batch")
    if method == "adjoint":
        return _loss_grad(model.spec, model.theta, X, y, margin)[1]
    if method != "fd":
        raise ValueError(f"unknown gradient method {method!r}")
    grad = np.zeros_like(model.theta)
    for idx in np.ndindex(*model.theta.shape):
        shifted = []
        for sign in (1, -1):
            th = model.theta.copy()
            th[idx] += sign * step
            shifted.append(margin_loss(scores(QuantumClassifier(model.spec, th), X), y, margin))
        grad[idx] = (shifted[0] - shifted[1]) / (2 * step)
    return grad


def _loss_grad(spec, theta, X, y, margin):
    """Batched loss and gradient.

    ``theta``: (..., C, P); ``X``: (..., B, d); ``y``: (..., B).
    Returns loss (...) and grad with theta's shape.
    """
    th = theta[..., None, :]  # (..., C, 1, P)
    xb = X[..., None, :, :]  # (..., 1, B, d)
    held = {}

    def cotangent(S):
        held["loss"], cot = _loss_and_cotangent(S, y, margin)
        return cot

    _, grad = expectation_vjp(spec, th, xb, cotangent)
    return held["loss"], grad[..., 0, :]


def _engine(engine: str) -> str:
    if engine == "auto":
        return "compiled" if _fastsim.AVAILABLE else "numpy"
    if engine not in ("compiled", "numpy"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "compiled" and not _fastsim.AVAILABLE:
        raise ValueError("the compiled engine needs numba")
    return engine


def batch_loss_grad(spec, theta, X, y, margin, engine="auto"):
    """Loss (R,) and gradient (R, C, P) for theta (R, C, P), X (R, B, d), y (R, B)."""
    if _engine(engine) == "compiled":
        return _fastsim.loss_grad(spec, theta, X, y, margin)
    return _loss_grad(spec, theta, X, y, margin)


def batch_scores(spec, theta, X, engine="auto"):
    """Scores (R, C, B) for theta (R, C, P) and X (R, B, d)."""
    if _engine(engine) == "compiled":
        return _fastsim.scores(spec, theta, X)
    return expectation_z(run_circuit(spec, theta[:, :, None, :], X[:, None]))


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, theta) -> "AdamState":
        return cls(np.zeros_like(theta), np.zeros_like(theta))


def adam_step(theta, grad, state: AdamState, lr: float = 0.01) -> np.ndarray:
    """One bias-corrected Adam update; ``state`` is advanced in place."""
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if theta.shape != grad.shape or state.m.shape != theta.shape:
        raise ValueError(f"shape mismatch: theta {theta.shape}, grad {grad.shape}, state {state.m.shape}")
    state.t += 1
    state.m = state.beta1 * state.m + (1 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1 - state.beta2) * grad**2
    m_hat = state.m / (1 - state.beta1**state.t)
    v_hat = state.v / (1 - state.beta2**state.t)
    return theta - lr * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class TrainTrace:
    test_accuracy: np.ndarray  # (epochs,)
    train_loss: np.ndarray  # (epochs,)
    model: QuantumClassifier

    @property
    def max_accuracy(self) -> float:
        return float(self.test_accuracy.max())


@dataclass
class TrainResult:
    dataset: str
    layer_kind: str
    n_layers: int
    accuracies: np.ndarray  # per-repetition max test accuracy
    seconds: float = field(default=0.0, compare=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))


def _check_width(ds: Dataset, spec: CircuitSpec):
    if ds.n_features != 2**spec.n_qubits:
        raise ValueError(
            f"{ds.name}: {ds.n_features} features do not fill {spec.n_qubits} qubits "
            f"({2**spec.n_qubits} amplitudes); prepare it with circuit_ready()"
        )


def rep_seed(seed: int, rep: int) -> int:
    return seed * 1000 + rep


def train_lockstep(splits, spec: CircuitSpec, n_classes: int, hyper: Hyperparams, seeds,
                   engine: str = "auto"):
    """Train one model per (train, test) pair in lockstep.

    All training sets must share a size (true for splits of one dataset).
    Every repetition draws its initial angles and batch orders from its own
    generator, so the result for one repetition does not depend on the others.
    Returns a list of :class:`TrainTrace`.
    """
    R = len(splits)
    n_train = {len(tr.labels) for tr, _ in splits}
    if len(n_train) != 1:
        raise ValueError("lockstep training needs equally sized training sets")
    n_train = n_train.pop()
    Xtr = np.stack([tr.features for tr, _ in splits])
    ytr = np.stack([tr.labels for tr, _ in splits])
    Xte = np.stack([te.features for _, te in splits])
    yte = np.stack([te.labels for _, te in splits])
    rngs = [np.random.default_rng(s) for s in seeds]
    theta = np.stack([rng.uniform(0.0, 2 * np.pi, (n_classes, spec.n_params)) for rng in rngs])
    state = AdamState.zeros_like(theta)
    acc = np.zeros((hyper.max_epochs, R))
    losses = np.zeros((hyper.max_epochs, R))
    rows = np.arange(R)[:, None]
    for epoch in range(hyper.max_epochs):
        order = np.stack([rng.permutation(n_train) for rng in rngs])
        total = np.zeros(R)
        for start in range(0, n_train, hyper.batch_size):
            idx = order[:, start:start + hyper.batch_size]
            loss, grad = batch_loss_grad(spec, theta, Xtr[rows, idx], ytr[rows, idx], hyper.margin, engine)
            if not np.all(np.isfinite(loss)):
                bad = int(np.flatnonzero(~np.isfinite(loss))[0])
                raise TrainingError(
                    f"non-finite loss in repetition {bad} (seed {seeds[bad]}), "
                    f"epoch {epoch}, batch starting at {start}"
                )
            total += loss * idx.shape[1]
            theta = adam_step(theta, grad, state, hyper.learning_rate)
        losses[epoch] = total / n_train
        if len(yte[0]):
            s = batch_scores(spec, theta, Xte, engine)  # (R, C, n_test)
            acc[epoch] = np.mean(predict_from_scores(s, axis=1) == yte, axis=1)
    return [TrainTrace(acc[:, r], losses[:, r], QuantumClassifier(spec, theta[r])) for r in range(R)]


def train(ds: Dataset, spec: CircuitSpec, hyper: Hyperparams = Hyperparams(), seed: int = 0) -> TrainTrace:
    """One repetition: a 70/30 split, mini-batch Adam, test accuracy after every epoch."""
    _check_width(ds, spec)
    sp = split(ds, hyper.split_ratio, seed)
    return train_lockstep([(sp.train, sp.test)], spec, ds.n_classes, hyper, [seed])[0]


def evaluate(ds: Dataset, spec: CircuitSpec, hyper: Hyperparams = Hyperparams(), seed: int = 0) -> TrainResult:
    """``hyper.repetitions`` repetitions with seeds ``rep_seed(seed, r)``; keeps each one's max accuracy."""
    _check_width(ds, spec)
    t0 = time.perf_counter()
    seeds = [rep_seed(seed, r) for r in range(hyper.repetitions)]
    splits = []
    for s in seeds:
        sp = split(ds, hyper.split_ratio, s)
        splits.append((sp.train, sp.test))
    traces = train_lockstep(splits, spec, ds.n_classes, hyper, seeds)
    accs = np.array([t.max_accuracy for t in traces])
    return TrainResult(ds.name, spec.layer_kind, spec.n_layers, accs, time.perf_counter() - t0)


# ----------------------------------------------------------------- sweep


def applicable_kinds(n_raw_features: int, kinds=LAYER_KINDS) -> list[str]:
    """Circular and Full need two wires; 2-feature data runs on one qubit."""
    if n_raw_features <= 2:
        return [k for k in kinds if k not in ("Circular", "Full")]
    return list(kinds)


CELL_FIELDS = ["dataset", "layer_kind", "n_layers", "mean", "std", "accuracies", "error"]


@dataclass
class SweepResult:
    cells: dict = field(default_factory=dict)  # (dataset, kind, n_layers) -> TrainResult | str
    datasets: list = field(default_factory=list)
    kinds: list = field(default_factory=lambda: list(LAYER_KINDS))

    def summary(self, dataset: str, kind: str):
        """(best mean accuracy, smallest layer count reaching it) or None if no cell ran."""
        done = [(L, r.mean) for (d, k, L), r in self.cells.items()
                if d == dataset and k == kind and isinstance(r, TrainResult)]
        if not done:
            return None
        best = max(m for _, m in done)
        return best, min(L for L, m in done if m == best)

    def tables(self):
        """Accuracy and layer-count tables: dataset -> kind -> value (missing kinds absent)."""
        acc, layers = {}, {}
        for d in self.datasets:
            acc[d], layers[d] = {}, {}
            for k in self.kinds:
                s = self.summary(d, k)
                if s is not None:
                    acc[d][k], layers[d][k] = s
        return acc, layers

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        acc, layers = self.tables()
        write_table(out / "accuracy_table.csv", acc, self.datasets, self.kinds, lambda v: f"{v:.4f}")
        write_table(out / "layers_table.csv", layers, self.datasets, self.kinds, str)
        write_cells(out / "cells.csv", self.cells)


def write_table(path, table, datasets, kinds, fmt) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset"] + [TABLE_COLUMNS[k] for k in kinds])
        for d in datasets:
            w.writerow([d] + [fmt(table[d][k]) if k in table[d] else MISSING for k in kinds])


def read_table(path, cast=float):
    """Inverse of :func:`write_table`: dataset -> kind -> value."""
    back = {v: k for k, v in TABLE_COLUMNS.items()}
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    kinds = [back[c] for c in rows[0][1:]]
    return {r[0]: {k: cast(v) for k, v in zip(kinds, r[1:]) if v != MISSING} for r in rows[1:]}


def _cell_row(key, res):
    d, k, L = key
    if isinstance(res, TrainResult):
        return [d, k, L, repr(res.mean), repr(res.std), " ".join(repr(float(a)) for a in res.accuracies), ""]
    return [d, k, L, "", "", "", res]


def write_cells(path, cells) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CELL_FIELDS)
        for key in sorted(cells, key=lambda t: (t[0], LAYER_KINDS.index(t[1]), t[2])):
            w.writerow(_cell_row(key, cells[key]))


def read_cells(path) -> dict:
    cells = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["dataset"], row["layer_kind"], int(row["n_layers"]))
            if row["error"]:
                cells[key] = row["error"]
            else:
                accs = np.array([float(a) for a in row["accuracies"].split()])
                cells[key] = TrainResult(key[0], key[1], key[2], accs)
    return cells


def sweep(datasets, layer_kinds=LAYER_KINDS, layer_counts=LAYER_COUNTS, hyper: Hyperparams = Hyperparams(),
          seed: int = 0, out_dir=None, log=None) -> SweepResult:
    """Evaluate every applicable (dataset, kind, count) cell.

    ``datasets`` is a sequence of raw :class:`Dataset` objects; each is
    prepared with :func:`circuit_ready`.  With ``out_dir`` set, finished
    cells are appended to ``cells.partial.csv`` and reused on a rerun, and the
    final tables are written there.  A failing cell is recorded as its error
    message and the sweep moves on.
    """
    result = SweepResult(datasets=[d.name for d in datasets], kinds=list(layer_kinds))
    partial = None
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        partial = Path(out_dir) / "cells.partial.csv"
        if partial.exists():
            result.cells.update(read_cells(partial))
        else:
            with open(partial, "w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(CELL_FIELDS)
    for raw in datasets:
        ds = circuit_ready(raw)
        n_qubits = ds.meta["n_qubits"]
        for kind in applicable_kinds(raw.n_features, layer_kinds):
            for L in layer_counts:
                key = (raw.name, kind, L)
                if key in result.cells:
                    continue
                try:
                    res = evaluate(ds, CircuitSpec(kind, n_qubits, L), hyper, seed)
                except (TrainingError, ValueError) as exc:
                    res = f"{type(exc).__name__}: {exc}"
                result.cells[key] = res
                if partial is not None:
                    with open(partial, "a", newline="") as fh:
                        csv.writer(fh, lineterminator="\n").writerow(_cell_row(key, res))
                if log:
                    if isinstance(res, TrainResult):
                        log(f"{raw.name} {kind} L={L}: mean {res.mean:.4f} ({res.seconds:.1f}s)")
                    else:
                        log(f"{raw.name} {kind} L={L}: failed: {res}")
    if out_dir is not None:
        result.write(out_dir)
    return result
