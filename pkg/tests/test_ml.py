import numpy as np
import pytest

from qarp import ml
from qarp.ml import (
    AdaBoostClassifier, AdaBoostRegressor, DecisionTreeClassifier, DecisionTreeRegressor, GaussianNB,
    KNeighborsClassifier, LinearRegression, NearestCentroid, NotFittedError, PredictionError,
    RandomForestClassifier,
)

sk = pytest.importorskip("sklearn")
from sklearn import linear_model, naive_bayes, neighbors  # noqa: E402
from sklearn import tree as sktree  # noqa: E402

RNG = np.random.default_rng(5)


def blobs(n=120, m=3, k=3, seed=0, spread=1.5):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, k, n)
    return rng.normal(size=(n, m)) * spread + y[:, None] * 2.0, y


# ----------------------------------------------------------------- examples

def test_dt_threshold_example():
    model = ml.fit("DT", [[0], [1], [2], [3]], ["A", "A", "B", "B"])
    assert model.root_.feature == 0 and model.root_.threshold == 1.5
    assert model.depth == 1
    assert ml.accuracy(["A", "A", "B", "B"], ml.predict(model, [[0], [1], [2], [3]])) == 1.0


def test_knn_with_k_equal_n_predicts_majority():
    model = ml.fit("kNN", [[0], [1], [2], [3], [4]], [1, 0, 1, 1, 0])
    np.testing.assert_array_equal(model.predict([[-5], [2], [100]]), [1, 1, 1])


def test_adaboost_regressor_learns_identity():
    x = np.arange(20.0)[:, None]
    for seed in range(10):
        model = ml.fit("Adaboost", x, x[:, 0], seed=seed, task="regression")
        assert ml.mae(x[:, 0], model.predict(x)) < 0.05


def test_nearest_centroid_example():
    model = NearestCentroid().fit([[-1], [1], [9], [11]], [0, 0, 1, 1])
    assert model.predict([[2]])[0] == 0


def test_linear_regression_on_exact_line():
    x = np.arange(10.0)[:, None]
    model = LinearRegression().fit(x, 2 * x[:, 0] + 1)
    np.testing.assert_allclose(model.predict([[2.5], [-3]]), [6, -5], atol=1e-9)


def test_forest_votes_equal_mode_of_members():
    X, y = blobs(seed=1)
    rf = RandomForestClassifier(10, random_state=3).fit(X, y)
    Q = RNG.normal(size=(200, 3)) * 3 + 2
    votes = rf.member_votes(Q)
    mode = [np.bincount(col, minlength=3).argmax() for col in votes.T]
    np.testing.assert_array_equal(rf.predict(Q), rf.classes_[mode])


def test_metrics():
    v = np.array([1, 2, 3])
    assert ml.accuracy(v, v) == 1.0 and ml.mae(v, v) == 0.0
    assert ml.mae([1, 16], [1, 8]) == 4.0
    a, b = RNG.integers(0, 4, 50), RNG.integers(0, 4, 50)
    assert ml.accuracy(a, b) == sum(int(p == q) for p, q in zip(a, b)) / 50
    assert ml.mae(a, b) == pytest.approx(sum(abs(int(p) - int(q)) for p, q in zip(a, b)) / 50)
    with pytest.raises(ValueError):
        ml.accuracy([1, 2], [1])
    with pytest.raises(ValueError):
        ml.mae([], [])


# ----------------------------------------------------------- error handling

def test_predict_before_fit():
    for kind in ml.CLASSIFIERS:
        with pytest.raises(NotFittedError):
            ml.make_learner(kind).predict([[0.0]])
    for kind in ml.REGRESSORS:
        with pytest.raises(NotFittedError):
            ml.make_learner(kind, "regression").predict([[0.0]])


def test_width_mismatch():
    X, y = blobs()
    for kind in ml.CLASSIFIERS:
        model = ml.fit(kind, X, y)
        with pytest.raises(PredictionError):
            model.predict(X[:, :2])


def test_empty_data_and_unknown_kind():
    with pytest.raises(ValueError):
        ml.fit("DT", np.zeros((0, 2)), [])
    with pytest.raises(KeyError):
        ml.make_learner("MLP")


def test_aliases_resolve():
    assert isinstance(ml.make_learner("GaussianNB"), GaussianNB)
    assert isinstance(ml.make_learner("AdaBoostR"), AdaBoostRegressor)


def test_constant_features_are_not_errors():
    X = np.ones((6, 2))
    y = [0, 1, 0, 1, 0, 1]
    for kind in ml.CLASSIFIERS:
        pred = ml.fit(kind, X, y).predict(X)
        assert set(pred) <= {0, 1}
    for kind in ml.REGRESSORS:
        pred = ml.fit(kind, X, np.arange(6.0), task="regression").predict(X)
        assert np.all(np.isfinite(pred))


# ----------------------------------------------------------------- properties

@pytest.mark.parametrize("kind", list(ml.CLASSIFIERS))
def test_outputs_are_valid_and_deterministic(kind):
    X, y = blobs(seed=2)
    labels = np.array(["a", "b", "c"])[y]
    p1 = ml.fit(kind, X, labels, seed=4).predict(X)
    p2 = ml.fit(kind, X, labels, seed=4).predict(X)
    np.testing.assert_array_equal(p1, p2)
    assert set(p1) <= {"a", "b", "c"} and len(p1) == len(X)


@pytest.mark.parametrize("kind", list(ml.REGRESSORS))
def test_regressors_deterministic(kind):
    X, y = blobs(seed=3)
    t = X.sum(axis=1)
    p1 = ml.fit(kind, X, t, seed=1, task="regression").predict(X)
    p2 = ml.fit(kind, X, t, seed=1, task="regression").predict(X)
    np.testing.assert_array_equal(p1, p2)


def test_trees_fit_consistent_data_perfectly():
    X, y = blobs(seed=4, spread=3.0)
    assert ml.accuracy(y, DecisionTreeClassifier().fit(X, y).predict(X)) == 1.0
    rf = RandomForestClassifier(10, random_state=0, bootstrap=False).fit(X, y)
    assert ml.accuracy(y, rf.predict(X)) == 1.0
    t = RNG.normal(size=len(X))
    np.testing.assert_allclose(DecisionTreeRegressor().fit(X, t).predict(X), t)


def test_knn_ignores_duplicates_beyond_rank_k():
    X, y = blobs(60, seed=5)
    model = KNeighborsClassifier(5).fit(X, y)
    Q = X[:10] + 0.01
    far = np.argmax(np.linalg.norm(X - Q[0], axis=1))
    model2 = KNeighborsClassifier(5).fit(np.vstack([X, X[far]]), np.r_[y, y[far]])
    assert model.predict(Q[:1])[0] == model2.predict(Q[:1])[0]


def test_gaussian_nb_brute_force():
    X = np.array([[0.0, 1.0], [0.5, 2.0], [3.0, 0.2], [3.5, 0.1], [1.0, 1.5], [2.5, 0.9]])
    y = np.array([0, 0, 1, 1, 0, 1])
    model = GaussianNB().fit(X, y)
    for q in RNG.normal(1.5, 2, (20, 2)):
        post = []
        for c in (0, 1):
            Xc = X[y == c]
            mu, var = Xc.mean(axis=0), Xc.var(axis=0)
            lik = np.prod(np.exp(-((q - mu) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var))
            post.append(lik * len(Xc) / len(X))
        post = np.array(post) / sum(post)
        jll = model.joint_log_likelihood(q[None])[0]
        got = np.exp(jll - jll.max())
        np.testing.assert_allclose(got / got.sum(), post, atol=1e-9)


def test_samme_weak_learners_beat_chance():
    X, y = blobs(200, seed=6, spread=2.5)
    ab = AdaBoostClassifier(50, max_depth=1, random_state=0).fit(X, y)
    errs = np.array(ab.estimator_errors_)
    assert len(errs) >= 2
    assert np.all(errs < 1 - 1 / 3)


def test_least_squares_residuals_orthogonal():
    X = RNG.normal(size=(40, 4))
    t = RNG.normal(size=40)
    model = LinearRegression().fit(X, t)
    r = t - model.predict(X)
    design = np.c_[np.ones(40), X]
    np.testing.assert_allclose(design.T @ r, 0, atol=1e-8)


# -------------------------------------------------------- library oracles

def _one_feature(n, seed):
    # float32-exact inputs: the library stores thresholds in single precision
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, 1)).astype(np.float32).astype(float)


def test_tree_matches_library():
    # one feature rules out equal-impurity ties between features, whose
    # tie-break (lowest index here, random order there) legitimately differs
    for seed in range(5):
        X = _one_feature(200, seed)
        y = (np.sin(3 * X[:, 0]) + np.random.default_rng(seed).normal(0, 0.5, 200) > 0).astype(int)
        Q = np.linspace(-3, 3, 401).astype(np.float32).astype(float)[:, None]
        ours = DecisionTreeClassifier().fit(X, y).predict(Q)
        ref = sktree.DecisionTreeClassifier(random_state=0).fit(X, y).predict(Q)
        np.testing.assert_array_equal(ours, ref)


def test_regression_tree_matches_library():
    for seed in range(5):
        X = _one_feature(150, seed)
        t = np.sin(2 * X[:, 0]) + np.random.default_rng(seed).normal(0, 0.2, 150)
        Q = np.linspace(-3, 3, 401).astype(np.float32).astype(float)[:, None]
        ours = DecisionTreeRegressor().fit(X, t).predict(Q)
        ref = sktree.DecisionTreeRegressor(random_state=0).fit(X, t).predict(Q)
        np.testing.assert_allclose(ours, ref, atol=1e-9)


def test_multifeature_tree_fits_like_library():
    X, y = blobs(200, seed=7)
    ours = DecisionTreeClassifier().fit(X, y)
    ref = sktree.DecisionTreeClassifier(random_state=0).fit(X, y)
    assert ml.accuracy(y, ours.predict(X)) == ref.score(X, y) == 1.0
    Q = RNG.normal(size=(300, 3)) * 3 + 2
    assert np.mean(ours.predict(Q) == ref.predict(Q)) > 0.8


def test_simple_models_match_library():
    X, y = blobs(150, seed=9)
    Q = RNG.normal(size=(200, 3)) * 3 + 2
    pairs = [
        (KNeighborsClassifier(5), neighbors.KNeighborsClassifier(5)),
        (NearestCentroid(), neighbors.NearestCentroid()),
        (GaussianNB(), naive_bayes.GaussianNB(var_smoothing=0.0)),
    ]
    for ours, ref in pairs:
        np.testing.assert_array_equal(ours.fit(X, y).predict(Q), ref.fit(X, y).predict(Q))
    t = X @ [1.0, -2.0, 0.5] + RNG.normal(size=150)
    np.testing.assert_allclose(
        LinearRegression().fit(X, t).predict(Q), linear_model.LinearRegression().fit(X, t).predict(Q), atol=1e-8
    )


def test_logistic_regression_agrees_with_library():
    X, y = blobs(200, seed=10)
    Q = RNG.normal(size=(300, 3)) * 3 + 2
    ours = ml.fit("LogisticRegression", X, y).predict(Q)
    ref = linear_model.LogisticRegression(max_iter=2000).fit(X, y).predict(Q)
    assert np.mean(ours == ref) > 0.85


def test_linear_svm_separates_separable_data():
    X = np.r_[RNG.normal(-3, 0.5, (30, 2)), RNG.normal(3, 0.5, (30, 2))]
    y = np.r_[np.zeros(30, int), np.ones(30, int)]
    assert ml.accuracy(y, ml.fit("SVM-Linear", X, y).predict(X)) == 1.0


def test_ensembles_generalise():
    X, y = blobs(300, seed=11)
    Xt, yt = blobs(300, seed=12)
    for kind in ("RF", "Ensemble-AB", "Ensemble-Bg", "Ensemble-GB"):
        assert ml.accuracy(yt, ml.fit(kind, X, y).predict(Xt)) > 0.6, kind
