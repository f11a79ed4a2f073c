"""Command line entry point: ``qarp <command> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import csv
import io
import json
import sys
from pathlib import Path

from . import processor as proc
from .complexity import MEASURE_NAMES, profile
from .data import PAPER_DATASETS, DataError, load_csv, make_dataset, normalize_samples, save_csv
from .pipeline import Config, load_run, run
from .vqc import sweep


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def _dataset(arg, seed, data_dir=None):
    """A benchmark name or a CSV path with a ``label`` column."""
    if Path(arg).suffix == ".csv" and Path(arg).exists():
        return load_csv(arg)
    return make_dataset(arg, seed, data_dir)


def _config(args) -> Config:
    """Config file (if any) with ``--set key=value`` overrides applied."""
    cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
    overrides = {}
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip().replace("-", "_")] = v
    if not overrides:
        return cfg
    parsed = Config.from_pairs(overrides)
    return dataclasses.replace(cfg, **{k: getattr(parsed, k) for k in overrides})


def cmd_gen_data(args):
    names = (args.dataset or []) + (args.datasets or []) or list(PAPER_DATASETS)
    out = Path(args.out)
    single_file = out.suffix == ".csv"
    if single_file and len(names) != 1:
        raise SystemExit("--out names a file; pass exactly one --dataset")
    (out.parent if single_file else out).mkdir(parents=True, exist_ok=True)
    for name in names:
        try:
            ds = make_dataset(name, args.seed, args.data_dir, args.samples)
        except (DataError, FileNotFoundError) as exc:
            _log(f"skip {name}: {exc}")
            continue
        save_csv(ds, out if single_file else out / f"{name}.csv")
        _log(f"{name}: {len(ds)} samples, {ds.n_features} features, {ds.n_classes} classes")


def cmd_complexity(args):
    source = args.input or args.dataset
    if not source:
        raise SystemExit("give a dataset name or --in data.csv")
    ds = _dataset(source, args.seed, args.data_dir)
    prof = profile(normalize_samples(ds), args.splits, 0.7, args.seed)
    if args.out:
        prof.to_csv(args.out, {"dataset": ds.name})
    for m in MEASURE_NAMES:
        print(f"{m}\t{prof[m]:.6f}")


def cmd_sweep(args):
    cfg = _config(args)
    names = args.datasets or list(cfg.datasets)
    datasets = []
    for name in names:
        try:
            datasets.append(_dataset(name, cfg.seed, cfg.data_dir or None))
        except (DataError, FileNotFoundError) as exc:
            _log(f"skip {name}: {exc}")
    sweep(datasets, cfg.layer_kinds, cfg.layer_counts, cfg.hyper, cfg.seed, args.out, _log)


def cmd_pipeline(args):
    cfg = _config(args)
    res = run(cfg, args.out, resume=args.resume, log=_log)
    for task, rep in res.reports.items():
        b = rep.best()
        mean, std, _, _ = b.stats
        _log(f"task {task}: best {b.model} {mean:.3f} +- {std:.3f}")


def _tables(args):
    return load_run(args.run, _config(args))


def cmd_tasks(args):
    res = _tables(args)
    for task in args.tasks:
        table = res.tables[task]
        models = args.models or None
        rep = proc.task_report(table, models, args.features, args.trials, args.seed)
        metric = "MAE" if task == "2" else "accuracy"
        for r in rep.rows:
            mean, std, lo, hi = r.stats
            print(f"{task}\t{r.model}\t{r.feature_set}\t{metric} {mean:.3f} +- {std:.3f} [{lo:.2f}, {hi:.2f}]")


def cmd_scan(args):
    res = _tables(args)
    scan = proc.scan_single_measures(res.tables[args.task], args.models or None, args.trials, args.seed)
    if args.out:
        scan.write(args.out)
    for (meas, model), row in scan.ranking()[: args.top]:
        mean, std, _, _ = row.stats
        print(f"{meas}\t{model}\t{mean:.3f} +- {std:.3f}")


def cmd_recommend(args):
    res = _tables(args)
    rec = proc.Recommender(args.classifier, args.classifier_features, args.regressor,
                           args.regressor_features, args.seed).fit(res.tables)
    if args.profile:
        values = read_profile(args.profile)
    else:
        ds = _dataset(args.dataset, args.seed, args.data_dir)
        values = profile(normalize_samples(ds), args.splits, 0.7, args.seed).values
    try:
        print(json.dumps(rec.recommend(values)))
    except proc.RecommendationError as exc:
        raise SystemExit(f"cannot recommend: {exc}")


def read_profile(path) -> dict:
    """Measure values from a profile CSV (first data row) or a JSON object."""
    text = Path(path).read_text()
    if Path(path).suffix == ".json":
        raw = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise SystemExit(f"{path}: no profile row")
        raw = rows[0]
    missing = [m for m in MEASURE_NAMES if m not in raw]
    if missing:
        raise SystemExit(f"{path}: missing measures {', '.join(missing)}")
    return {m: float(raw[m]) for m in MEASURE_NAMES}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qarp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--data-dir", default=None, help="directory holding the real-data CSVs")

    def config(sp):
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")

    sp = sub.add_parser("gen-data", help="write the benchmark datasets as CSV")
    common(sp)
    sp.add_argument("--dataset", action="append", help="benchmark name (repeatable)")
    sp.add_argument("--samples", type=int, help="override the size of a synthetic dataset")
    sp.add_argument("--out", required=True, help="directory, or a .csv file for one dataset")
    sp.add_argument("datasets", nargs="*")
    sp.set_defaults(func=cmd_gen_data)

    sp = sub.add_parser("complexity", help="complexity profile of one dataset")
    common(sp)
    sp.add_argument("dataset", nargs="?", help="benchmark name or CSV path")
    sp.add_argument("--in", dest="input", help="CSV with a label column")
    sp.add_argument("--splits", type=int, default=10)
    sp.add_argument("--out", help="profile CSV: one row of 22 measures")
    sp.set_defaults(func=cmd_complexity)

    sp = sub.add_parser("sweep", help="train every circuit kind and depth")
    config(sp)
    sp.add_argument("datasets", nargs="*", help="benchmark names or CSV paths (default: config)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("pipeline", help="full run: profiles, sweep, targets, tasks")
    config(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--resume", action="store_true", help="reuse profiles and finished sweep cells")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("tasks", help="re-run recommendation tasks on a finished run")
    config(sp)
    sp.add_argument("run", help="pipeline output directory")
    sp.add_argument("--tasks", nargs="+", default=list(proc.TASKS), choices=proc.TASKS)
    sp.add_argument("--models", nargs="+")
    sp.add_argument("--features", default=proc.ALL, choices=(proc.ALL,) + MEASURE_NAMES)
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_tasks)

    sp = sub.add_parser("scan", help="rank single complexity measures for one task")
    config(sp)
    sp.add_argument("run")
    sp.add_argument("--task", default="1-B", choices=proc.TASKS)
    sp.add_argument("--models", nargs="+")
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--top", type=int, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("recommend", help="circuit kind and depth for a new dataset")
    common(sp)
    config(sp)
    sp.add_argument("run", help="pipeline output directory with the meta-tables")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--dataset", help="benchmark name or CSV path")
    src.add_argument("--profile", help="profile CSV (from `qarp complexity --out`) or JSON")
    sp.add_argument("--splits", type=int, default=10)
    sp.add_argument("--classifier", default="DT")
    sp.add_argument("--classifier-features", default="T2")
    sp.add_argument("--regressor", default="Adaboost")
    sp.add_argument("--regressor-features", default="N2")
    sp.set_defaults(func=cmd_recommend)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
