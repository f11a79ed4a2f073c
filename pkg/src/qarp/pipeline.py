"""End-to-end run: datasets -> complexity profiles -> circuit sweep -> recommendation tasks.

Every stage writes plain CSV into one output directory.  CSV bodies depend
only on the configuration (no timings, no timestamps), so two runs with the
same config produce identical files; run metadata goes to ``manifest.json``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from . import processor as proc
from .complexity import MEASURE_NAMES, profile
from .data import PAPER_DATASETS, DataError, make_dataset, normalize_samples
from .qsim import LAYER_COUNTS, LAYER_KINDS, qubit_count
from .vqc import Hyperparams, read_cells, sweep, SweepResult

# outputs compared byte-for-byte between runs
DETERMINISTIC_OUTPUTS = (
    "profiles.csv", "sweep/accuracy_table.csv", "sweep/layers_table.csv", "sweep/cells.csv",
    "targets.csv", "task1a.csv", "task1b.csv", "task2.csv",
    "scan_task1a.csv", "scan_task1b.csv", "scan_task2.csv",
)


@dataclass
class Config:
    seed: int = 0
    datasets: tuple = PAPER_DATASETS
    layer_kinds: tuple = LAYER_KINDS
    layer_counts: tuple = LAYER_COUNTS
    profile_splits: int = 10
    split_ratio: float = 0.7
    margin: float = 0.15
    batch_size: int = 10
    learning_rate: float = 0.01
    max_epochs: int = 100
    repetitions: int = 10
    trials: int = 30
    tie_tol: float = proc.TIE_TOL
    classifiers: tuple = proc.TASK1_MODELS
    regressors: tuple = proc.TASK2_MODELS
    scan: bool = True
    data_dir: str = ""

    @property
    def hyper(self) -> Hyperparams:
        return Hyperparams(self.margin, self.batch_size, self.learning_rate, self.max_epochs,
                           self.repetitions, self.split_ratio)

    @classmethod
    def from_pairs(cls, pairs: dict) -> "Config":
        """Build from string ``key=value`` pairs; list fields are comma separated."""
        types = {f.name: f.default for f in fields(cls)}
        kw = {}
        for key, raw in pairs.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            raw = raw.strip()
            default = types[key]
            if isinstance(default, tuple):
                items = [s.strip() for s in raw.split(",") if s.strip()]
                kw[key] = tuple(int(s) for s in items) if key == "layer_counts" else tuple(items)
            elif isinstance(default, bool):
                if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"{key}: expected a boolean, got {raw!r}")
                kw[key] = raw.lower() in ("true", "1", "yes")
            else:
                kw[key] = type(default)(raw)
        cfg = cls(**kw)
        cfg.hyper  # validates
        return cfg

    @classmethod
    def load(cls, path) -> "Config":
        pairs = {}
        for n, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            pairs[k] = v
        return cls.from_pairs(pairs)


    def as_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    def checksum(self) -> str:
        """Hash of everything that affects CSV outputs (``data_dir`` excluded)."""
        d = self.as_dict()
        d.pop("data_dir")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


class PipelineError(RuntimeError):
    """A stage failed; the message starts with the stage name."""


@dataclass
class RunResult:
    out_dir: Path
    profiles: dict
    sweep: SweepResult
    targets: proc.Targets
    tables: dict
    reports: dict = field(default_factory=dict)
    scans: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)


def load_datasets(cfg: Config, log=None):
    """(datasets, skipped) where ``skipped`` maps name -> reason (e.g. missing CSV)."""
    out, skipped = [], {}
    for name in cfg.datasets:
        try:
            out.append(make_dataset(name, cfg.seed, cfg.data_dir or None))
        except (DataError, FileNotFoundError) as exc:
            skipped[name] = f"{type(exc).__name__}: {exc}"
            if log:
                log(f"skip {name}: {exc}")
    return out, skipped


def write_profiles(path, profiles: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset"] + list(MEASURE_NAMES))
        for name, vals in profiles.items():
            w.writerow([name] + [repr(float(vals[m])) for m in MEASURE_NAMES])


def read_profiles(path) -> dict:
    with open(path, newline="") as fh:
        return {r["dataset"]: {m: float(r[m]) for m in MEASURE_NAMES} for r in csv.DictReader(fh)}


def write_targets(path, targets: proc.Targets) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "tied_kinds", "task1a_kind", "task2_layers"])
        for name in targets.task1a:
            w.writerow([name, " ".join(targets.tied[name]), targets.task1a[name], targets.task2[name]])


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"[{name}] {type(exc).__name__}: {exc}") from exc


def _manifest(cfg, names, n_qubits, skipped, status, seconds=None) -> dict:
    return {
        "qarp_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg.as_dict(),
        "config_checksum": cfg.checksum(),
        "datasets": names,
        "n_qubits": n_qubits,
        "skipped": skipped,
        "status": status,
        "seconds": seconds,
    }


def _check_resume(out: Path, cfg: Config):
    path = out / "manifest.json"
    if not path.exists():
        return
    old = json.loads(path.read_text()).get("config_checksum")
    if old is not None and old != cfg.checksum():
        raise PipelineError(f"[resume] {out} was produced with a different config "
                            f"(checksum {old}, now {cfg.checksum()})")


def _profiles(cfg, datasets, prof_path, resume, log):
    profiles = read_profiles(prof_path) if resume and prof_path.exists() else {}
    for ds in datasets:
        if ds.name not in profiles:
            if log:
                log(f"profile {ds.name}")
            try:
                profiles[ds.name] = profile(normalize_samples(ds), cfg.profile_splits,
                                            cfg.split_ratio, cfg.seed).values
            except Exception as exc:
                raise PipelineError(f"[complexity] {ds.name}: {exc}") from exc
    profiles = {d.name: profiles[d.name] for d in datasets}
    write_profiles(prof_path, profiles)
    return profiles


def run_tasks(res: "RunResult", cfg: Config, log=None) -> "RunResult":
    """Task reports and single-measure scans from built meta-tables."""
    for task, fname in (("1-A", "task1a"), ("1-B", "task1b"), ("2", "task2")):
        models = cfg.regressors if task == "2" else cfg.classifiers
        if log:
            log(f"task {task}")
        rep = proc.task_report(res.tables[task], models, proc.ALL, cfg.trials, cfg.seed)
        rep.write(res.out_dir / f"{fname}.csv")
        res.reports[task] = rep
        if cfg.scan:
            scan = proc.scan_single_measures(res.tables[task], models, cfg.trials, cfg.seed)
            scan.write(res.out_dir / f"scan_{fname}.csv")
            res.scans[task] = scan
    return res


def run(cfg: Config, out_dir, resume: bool = False, log=None) -> RunResult:
    """data -> complexity -> sweep -> targets -> tasks, all outputs under ``out_dir``.

    With ``resume`` the stored profiles and finished sweep cells are reused,
    provided the directory was produced with the same config.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if resume:
        _check_resume(out, cfg)
    t0 = time.time()
    datasets, skipped = _stage("data", load_datasets, cfg, log)
    if len(datasets) < 3:
        raise PipelineError(f"[data] only {len(datasets)} datasets available; the tasks need at least 3")
    names = [d.name for d in datasets]
    n_qubits = {d.name: qubit_count(d.n_features) for d in datasets}
    (out / "manifest.json").write_text(
        json.dumps(_manifest(cfg, names, n_qubits, skipped, "running"), indent=2) + "\n")

    profiles = _profiles(cfg, datasets, out / "profiles.csv", resume, log)

    sweep_dir = out / "sweep"
    partial = sweep_dir / "cells.partial.csv"
    if not resume and partial.exists():
        partial.unlink()
    sw = _stage("sweep", sweep, datasets, cfg.layer_kinds, cfg.layer_counts, cfg.hyper, cfg.seed,
                sweep_dir, log)

    acc, layers = sw.tables()
    targets = _stage("targets", proc.derive_targets, acc, layers, n_qubits, cfg.tie_tol)
    write_targets(out / "targets.csv", targets)
    tables = _stage("targets", proc.build_tables, profiles, targets)

    res = RunResult(out, profiles, sw, targets, tables, skipped=skipped)
    _stage("tasks", run_tasks, res, cfg, log)
    (out / "manifest.json").write_text(json.dumps(
        _manifest(cfg, names, n_qubits, skipped, "complete", round(time.time() - t0, 1)), indent=2) + "\n")
    return res


def load_run(out_dir, cfg: Config | None = None) -> RunResult:
    """Rebuild targets and tables from a finished run directory (no training)."""
    cfg = cfg or Config()
    out = Path(out_dir)
    profiles = read_profiles(out / "profiles.csv")
    cells = read_cells(out / "sweep" / "cells.csv")
    manifest = json.loads((out / "manifest.json").read_text()) if (out / "manifest.json").exists() else {}
    names = manifest.get("datasets") or list(profiles)
    sw = SweepResult(cells, names, list(manifest.get("config", {}).get("layer_kinds", cfg.layer_kinds)))
    acc, layers = sw.tables()
    n_qubits = manifest.get("n_qubits", {})
    targets = proc.derive_targets(acc, layers, n_qubits, cfg.tie_tol)
    return RunResult(out, profiles, sw, targets, proc.build_tables(profiles, targets),
                     skipped=manifest.get("skipped", {}))

