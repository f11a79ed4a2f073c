import numpy as np
import pytest

from qarp import processor as proc
from qarp.complexity import MEASURE_NAMES
from qarp.processor import (
    ALL, DerivationError, RecommendationError, RecommendationTable, Recommender, TaskReport,
    build_tables, derive_targets, holdouts, read_report, round_up_layers, run_task1, run_task2,
    scan_single_measures, task_report,
)
from qarp.qsim import LAYER_COUNTS

import metatables

BLOBS_4F_2C_ACC = {"C1": 1.0, "C2": 1.0, "C3": 1.0, "ZZFM": 1.0, "Circular": 1.0, "Full": 0.5417}
BLOBS_4F_2C_LAY = {"C1": 1, "C2": 2, "C3": 8, "ZZFM": 3, "Circular": 2, "Full": 4}


def flat_profile(value=0.3):
    p = {m: value for m in MEASURE_NAMES}
    p["C1"], p["C2"] = 0.0, 0.0
    return p


# ---------------------------------------------------------------- targets

def test_blobs_4f_2c_target_is_largest_tied_depth():
    t = derive_targets({"b": BLOBS_4F_2C_ACC}, {"b": BLOBS_4F_2C_LAY}, {"b": 2})
    assert t.tied["b"] == ["C1", "C2", "C3", "ZZFM", "Circular"]
    assert t.task2["b"] == 8
    # fewest parameters per layer among the tied kinds
    assert t.task1a["b"] == "C2"


def test_xor_contributes_four_rows():
    acc = {"xor": {"C1": 1.0, "C2": 1.0, "C3": 1.0, "ZZFM": 1.0}}
    lay = {"xor": {"C1": 2, "C2": 1, "C3": 1, "ZZFM": 4}}
    t = derive_targets(acc, lay, {"xor": 1})
    assert [k for d, k in t.task1b if d == "xor"] == ["C1", "C2", "C3", "ZZFM"]
    assert t.task2["xor"] == 4


def test_unique_maximum():
    acc = {"d": {"C1": 0.7, "C2": 0.8, "C3": 0.95, "ZZFM": 0.6}}
    lay = {"d": {"C1": 1, "C2": 2, "C3": 16, "ZZFM": 4}}
    t = derive_targets(acc, lay)
    assert t.task1a["d"] == "C3" and t.task1b == [("d", "C3")] and t.task2["d"] == 16


def test_tie_tolerance():
    acc = {"d": {"C1": 1.0, "C2": 1.0 - 5e-5, "C3": 1.0 - 2e-4, "ZZFM": 0.5}}
    lay = {"d": {"C1": 1, "C2": 2, "C3": 3, "ZZFM": 4}}
    assert derive_targets(acc, lay).tied["d"] == ["C1", "C2"]


def test_derivation_errors():
    with pytest.raises(DerivationError):
        derive_targets({"d": {"C1": 1.0}}, {})
    with pytest.raises(DerivationError):
        derive_targets({"d": {"C1": 1.0}}, {"d": {"C2": 3}})
    with pytest.raises(DerivationError):
        derive_targets({"d": {}}, {"d": {}})


def test_tables_shapes_and_multisets():
    rng = np.random.default_rng(0)
    acc, lay, nq, prof = metatables.random_meta(rng, 10)
    t = derive_targets(acc, lay, nq)
    tables = build_tables(prof, t)
    assert len(tables["1-A"]) == 10 and len(tables["2"]) == 10
    assert tables["1-A"].features.shape == (10, 22)
    got = sorted(zip(tables["1-B"].datasets, tables["1-B"].target))
    assert got == sorted((d, k) for d in t.tied for k in t.tied[d])
    assert set(tables["2"].target) <= set(LAYER_COUNTS)
    with pytest.raises(DerivationError):
        build_tables({}, t)


def test_target_covers_every_tied_depth():
    rng = np.random.default_rng(1)
    for _ in range(200):
        acc, lay, nq, _ = metatables.random_meta(rng)
        t = derive_targets(acc, lay, nq)
        for d, kinds in t.tied.items():
            assert all(t.task2[d] >= lay[d][k] for k in kinds)
            assert t.task1a[d] in kinds


# ------------------------------------------------------------------ tasks

def const_table(task, n=8, value="C2"):
    rng = np.random.default_rng(3)
    target = np.full(n, 4.0) if task == "2" else np.array([value] * n)
    acc = [frozenset([t]) for t in target]
    return RecommendationTable(task, [f"d{i}" for i in range(n)], rng.uniform(size=(n, 22)), target, acc)


def test_constant_labels_are_always_right():
    for task in ("1-A", "1-B"):
        rep = task_report(const_table(task), trials=5)
        for r in rep.rows:
            assert r.stats == (1.0, 0.0, 1.0, 1.0), r.model


def test_constant_target_has_zero_error():
    rep = task_report(const_table("2"), trials=5)
    for r in rep.rows:
        assert r.stats[0] == pytest.approx(0.0, abs=1e-12), r.model


def test_unknown_measure():
    with pytest.raises(KeyError):
        run_task1(const_table("1-A"), "DT", "F9")


def test_task_kind_checks():
    with pytest.raises(ValueError):
        run_task1(const_table("2"), "DT")
    with pytest.raises(ValueError):
        run_task2(const_table("1-A"), "DTR")


def test_holdouts():
    h = holdouts(29, 2, 30, seed=0, task="1-B")
    assert len(h) == 30 and all(len(x) == 2 and len(set(x)) == 2 for x in h)
    again = holdouts(29, 2, 30, seed=0, task="1-B")
    assert all(np.array_equal(a, b) for a, b in zip(h, again))
    a = holdouts(14, 1, 30, 0, "1-A")
    b = holdouts(14, 1, 30, 0, "2")
    assert not all(np.array_equal(x, y) for x, y in zip(a, b))


def test_set_membership_scoring():
    # two datasets each with tied kinds; the row label differs from the prediction
    X = np.r_[np.zeros((4, 22)), np.ones((4, 22))]
    target = np.array(["C1", "C2", "C1", "C2", "C3", "ZZFM", "C3", "ZZFM"])
    accepted = [frozenset({"C1", "C2"})] * 4 + [frozenset({"C3", "ZZFM"})] * 4
    table = RecommendationTable("1-B", ["a"] * 4 + ["b"] * 4, X, target, accepted)
    row = run_task1(table, "NearestCentroid", ALL, trials=20)
    assert row.stats[0] == 1.0
    assert row.row_accuracy.mean() < 1.0


def test_too_few_rows():
    with pytest.raises(DerivationError):
        run_task1(const_table("1-B", n=2), "DT")


def test_report_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    acc, lay, nq, prof = metatables.random_meta(rng, 12)
    tables = build_tables(prof, derive_targets(acc, lay, nq))
    for task in proc.TASKS:
        rep = task_report(tables[task], models=["DT" if task != "2" else "DTR", "kNN" if task != "2" else "kNNR"],
                          trials=30, seed=3)
        rep.write(tmp_path / "r.csv")
        back = read_report(tmp_path / "r.csv")
        for a, b in zip(rep.rows, back.rows):
            assert len(b.trials) == 30
            np.testing.assert_array_equal(a.trials, b.trials)
            np.testing.assert_allclose(b.stats, [np.mean(b.trials), np.std(b.trials),
                                                 np.min(b.trials), np.max(b.trials)], atol=1e-12)
        again = task_report(tables[task], models=[r.model for r in rep.rows], trials=30, seed=3)
        assert all(np.array_equal(a.trials, b.trials) for a, b in zip(rep.rows, again.rows))


def test_report_best():
    rep = TaskReport("2")
    rep.add(proc.TaskRow("2", "a", ALL, np.array([1.0, 2.0])))
    rep.add(proc.TaskRow("2", "b", ALL, np.array([0.5, 0.5])))
    assert rep.best().model == "b"
    rep1 = TaskReport("1-A", [proc.TaskRow("1-A", m, ALL, np.array(v)) for m, v in (("a", [1.0]), ("b", [0.0]))])
    assert rep1.best().model == "a"
    with pytest.raises(KeyError):
        rep.get("c")


def test_scan_shape_and_failures(tmp_path):
    rng = np.random.default_rng(4)
    acc, lay, nq, prof = metatables.random_meta(rng, 8)
    tables = build_tables(prof, derive_targets(acc, lay, nq))
    scan = scan_single_measures(tables["2"], models=["DTR", "kNNR"], trials=4)
    assert len(scan.cells) == 22 * 2
    best_key, best_row = scan.best()
    assert best_row.stats[0] == min(r.stats[0] for _, r in scan.ranking())
    scan.write(tmp_path / "s.csv")
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 45
    broken = scan_single_measures(const_table("1-A", n=1), models=["DT"], trials=2)
    assert all(isinstance(v, str) for v in broken.cells.values())


# --------------------------------------------------------------- recommend

@pytest.mark.parametrize("pred,want", [(5.2, 8), (1.0, 1), (0.2, 1), (3.0000000001, 3), (2.5, 3), (16, 16)])
def test_round_up(pred, want):
    assert round_up_layers(pred) == want


@pytest.mark.parametrize("pred", [16.5, float("nan"), float("inf")])
def test_round_up_rejects(pred):
    with pytest.raises(RecommendationError):
        round_up_layers(pred)


def _fitted(seed=0):
    acc, lay, nq, prof = metatables.random_meta(np.random.default_rng(seed), 12)
    t = derive_targets(acc, lay, nq)
    return Recommender().fit(build_tables(prof, t)), t


def test_recommender_output():
    rec, t = _fitted()
    out = proc.recommend(flat_profile(), rec)
    assert set(out) == {"layer_kind", "n_layers"}
    assert out["layer_kind"] in {k for _, k in t.task1b}
    assert out["n_layers"] in LAYER_COUNTS
    assert out["n_layers"] >= rec.raw_layers(flat_profile()) - 1e-9


def test_recommender_rejects_bad_profiles():
    rec, _ = _fitted()
    single = flat_profile()
    single["C1"], single["C2"] = 1.0, 0.0
    with pytest.raises(RecommendationError):
        rec.recommend(single)
    nan = flat_profile()
    nan["T2"] = float("nan")
    with pytest.raises(RecommendationError):
        rec.recommend(nan)
    partial = flat_profile()
    del partial["N2"]
    with pytest.raises(RecommendationError):
        rec.recommend(partial)
    with pytest.raises(RecommendationError):
        Recommender().recommend(flat_profile())


def test_recommend_never_below_regressor():
    rng = np.random.default_rng(5)
    for s in range(20):
        rec, _ = _fitted(s)
        for _ in range(10):
            p = metatables.random_profile(rng)
            assert rec.recommend(p)["n_layers"] >= rec.raw_layers(p) - 1e-9


def test_leave_one_dataset_out_clone():
    # two well separated families; a clone of one family member gets a tied-best kind
    names = [f"a{i}" for i in range(5)] + [f"b{i}" for i in range(5)]
    acc = {n: ({"C1": 1.0, "C2": 1.0, "C3": 0.7, "ZZFM": 0.6} if n[0] == "a"
               else {"C1": 0.6, "C2": 0.5, "C3": 0.9, "ZZFM": 0.9}) for n in names}
    lay = {n: {"C1": 2, "C2": 1, "C3": 8, "ZZFM": 16} for n in names}
    prof = {}
    for i, n in enumerate(names):
        p = flat_profile(0.1 if n[0] == "a" else 0.8)
        p["T2"] = 0.002 + 0.0001 * i if n[0] == "a" else 0.2 + 0.01 * i
        p["N2"] = 0.1 if n[0] == "a" else 0.6
        prof[n] = p
    targets = derive_targets(acc, lay)
    rec = Recommender().fit(build_tables({k: v for k, v in prof.items() if k != "a0"},
                                         derive_targets({k: v for k, v in acc.items() if k != "a0"},
                                                        lay)))
    out = rec.recommend(prof["a0"])
    assert out["layer_kind"] in targets.tied["a0"]
    assert out["n_layers"] >= targets.task2["a0"]
