import numpy as np
import pytest

from qarp import data
from qarp.data import (
    DataError, Dataset, circuit_ready, gen_blobs, gen_circles, gen_moons, gen_xor, load_csv,
    make_dataset, normalize_samples, save_csv, split,
)


def test_blobs_shapes_and_balance():
    ds = gen_blobs(2, 2, 1000, 0.5, seed=0)
    assert ds.features.shape == (1000, 2)
    np.testing.assert_array_equal(ds.class_counts(), [500, 500])
    ds = gen_blobs(4, 4, 1000, 0.5, seed=3)
    assert ds.features.shape == (1000, 4) and ds.n_classes == 4
    assert np.ptp(ds.class_counts()) <= 1


def test_blob_centers_are_separated():
    for seed in range(20):
        c = np.array(gen_blobs(4, 4, 40, 0.5, seed).meta["centers"])
        d = np.linalg.norm(c[:, None] - c[None], axis=-1)
        assert d[np.triu_indices(4, 1)].min() >= 2.0
        assert np.all(np.abs(c) <= 10)


def test_degenerate_blobs_sit_on_centers():
    ds = gen_blobs(2, 3, 30, 1e-9, seed=1)
    c = np.array(ds.meta["centers"])
    np.testing.assert_allclose(ds.features, c[ds.labels], atol=1e-7)
    # nearest-center rule classifies every point
    pred = np.argmin(np.linalg.norm(ds.features[:, None] - c[None], axis=-1), axis=1)
    assert np.all(pred == ds.labels)


def test_blob_parameter_errors():
    for args in ((3, 2, 10, 0.5), (2, 5, 10, 0.5), (2, 2, 10, 0.0)):
        with pytest.raises(DataError):
            gen_blobs(*args)


def test_circles():
    ds = gen_circles(100, 0.8, seed=0, noise=0.0)
    r = np.linalg.norm(ds.features, axis=1)
    np.testing.assert_allclose(r[ds.labels == 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(r[ds.labels == 1], 0.8, atol=1e-12)
    assert len(gen_circles(100, 0.5, seed=0)) == 100
    for f in (0.0, 1.0, 1.5):
        with pytest.raises(DataError):
            gen_circles(10, f)


def test_moons():
    ds = gen_moons(100, seed=0)
    np.testing.assert_array_equal(ds.class_counts(), [50, 50])
    tiny = gen_moons(4, seed=0)
    np.testing.assert_array_equal(tiny.class_counts(), [2, 2])
    exact = gen_moons(20, seed=0, noise=0.0)
    up = exact.features[exact.labels == 0]
    down = exact.features[exact.labels == 1]
    np.testing.assert_allclose(np.linalg.norm(up, axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(np.linalg.norm(down - [1.0, 0.5], axis=1), 1.0, atol=1e-9)
    with pytest.raises(DataError):
        gen_moons(3)


def test_xor_diagonals_share_class():
    ds = gen_xor(2000, seed=0)
    assert len(ds) == 2000
    np.testing.assert_array_equal(ds.class_counts(), [1000, 1000])
    quad = (np.sign(ds.features[:, 0]) * np.sign(ds.features[:, 1]) > 0).astype(int)
    # quadrant parity predicts the class up to the small blob tails
    assert np.mean((1 - quad) == ds.labels) > 0.99


def test_csv_round_trip(tmp_path):
    ds = gen_blobs(4, 3, 30, 0.5, seed=2)
    save_csv(ds, tmp_path / "b.csv")
    back = load_csv(tmp_path / "b.csv")
    np.testing.assert_allclose(back.features, ds.features, atol=1e-12)
    np.testing.assert_array_equal(back.labels, ds.labels)


def test_csv_padding_and_string_labels(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("a,b,c,label\n1,2,3,yes\n4,5,6,no\n7,8,9,yes\n")
    ds = load_csv(p, pad_to=4)
    assert ds.features.shape == (3, 4)
    np.testing.assert_array_equal(ds.features[:, 3], 0.1)
    np.testing.assert_array_equal(ds.labels, [1, 0, 1])


def test_csv_single_row_is_valid_until_split(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("a,label\n1.5,0\n")
    ds = load_csv(p)
    assert len(ds) == 1
    with pytest.raises(DataError):
        split(ds, 0.7, 0)


@pytest.mark.parametrize("body,where", [
    ("a,b,label\n1,2,0\n3,0\n", "row"),
    ("a,b,label\n1,x,0\n", "column"),
])
def test_csv_errors_name_location(tmp_path, body, where):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(DataError, match=where):
        load_csv(p)


def test_csv_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv")


def test_normalize_examples():
    ds = Dataset("t", [[3, 4], [0.1, 0.1]], [0, 1], 2)
    out = normalize_samples(ds)
    np.testing.assert_allclose(out.features[0], [0.6, 0.8], atol=1e-12)
    np.testing.assert_allclose(normalize_samples(Dataset("t", [[0.1] * 4], [0], 1)).features, [[0.5] * 4])
    np.testing.assert_allclose(normalize_samples(out).features, out.features, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(out.features, axis=1), 1, atol=1e-9)


def test_normalize_rejects_zero_row():
    with pytest.raises(DataError, match="row 1"):
        normalize_samples(Dataset("t", [[1, 2], [0, 0]], [0, 1], 2))


def test_normalize_removes_positive_row_scaling():
    ds = gen_blobs(4, 2, 40, 0.5, seed=5)
    scaled = Dataset("s", ds.features * np.random.default_rng(0).uniform(0.1, 10, (40, 1)), ds.labels, 2)
    np.testing.assert_allclose(normalize_samples(scaled).features, normalize_samples(ds).features, atol=1e-12)


def test_split_sizes_and_determinism():
    ds = gen_blobs(2, 2, 1000, 0.5, seed=0)
    sp = split(ds, 0.7, 3)
    assert (len(sp.train), len(sp.test)) == (700, 300)
    again = split(ds, 0.7, 3)
    np.testing.assert_array_equal(sp.train_index, again.train_index)
    small = Dataset("s", np.arange(10.0)[:, None], np.r_[np.zeros(5, int), np.ones(5, int)], 2)
    sp = split(small, 0.7, 0)
    assert (len(sp.train), len(sp.test)) == (7, 3)


def test_split_partitions_for_many_seeds():
    ds = gen_moons(101, seed=0)
    for seed in range(100):
        sp = split(ds, 0.7, seed)
        both = np.concatenate([sp.train_index, sp.test_index])
        assert len(np.intersect1d(sp.train_index, sp.test_index)) == 0
        np.testing.assert_array_equal(np.sort(both), np.arange(101))
        assert abs(len(sp.train) - 0.7 * 101) <= 1


def test_circuit_ready_pads_after_normalizing():
    ds = make_dataset("Haberman")
    ready = circuit_ready(ds)
    assert ready.n_features == 4 and ready.meta["n_qubits"] == 2
    np.testing.assert_array_equal(ready.features[:, 3], 0.1)
    np.testing.assert_allclose(np.linalg.norm(ready.features[:, :3], axis=1), 1, atol=1e-12)
    two = circuit_ready(make_dataset("moons-2F-2C"))
    assert two.n_features == 2 and two.meta["n_qubits"] == 1


def test_real_datasets():
    iris = make_dataset("Iris")
    assert iris.features.shape == (150, 4) and iris.n_classes == 3
    pima = make_dataset("PIMA-8F-2C")
    assert pima.features.shape == (768, 8)
    np.testing.assert_array_equal(np.sort(pima.class_counts()), [268, 500])
    hab = make_dataset("Haberman")
    assert hab.features.shape == (306, 3)
    np.testing.assert_array_equal(np.sort(hab.class_counts()), [81, 225])


def test_missing_real_file_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        make_dataset("Banknote", data_dir=tmp_path)


def test_benchmark_sizes():
    sizes = {"blobs-2F-2C": 1000, "blobs-4F-4C": 1000, "circle-factor-0.5-2F-2C": 100,
             "circle-factor-default-2F-2C": 100, "moons-2F-2C": 100, "XOR-2F-2C": 2000}
    for name, n in sizes.items():
        assert len(make_dataset(name, 0)) == n
    assert len(make_dataset("moons-2F-2C", 0, n_samples=10)) == 10
    with pytest.raises(DataError):
        make_dataset("nonsense")
    assert len(data.PAPER_DATASETS) == 14
