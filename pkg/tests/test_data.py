import numpy as np
import pytest

from netclass import (
    BlobSpec,
    ConfigError,
    DataError,
    Dataset,
    apply_normalization,
    fit_normalization,
    generate_blobs,
    load_csv,
    two_blobs,
    stratified_kfold,
)
from netclass.data import invert_normalization, load_matrix_csv, stratified_subsample, write_csv


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# --- load_csv ---------------------------------------------------------------------


def test_load_small(tmp_path):
    p = _write(tmp_path, "a,b,species\n1,2,x\n3,4.5,y\n-1,0,x\n")
    ds = load_csv(p, "species")
    assert ds.features.shape == (3, 2)
    assert ds.feature_names == ["a", "b"]
    assert ds.labels.tolist() == ["x", "y", "x"]


def test_label_column_in_middle(tmp_path):
    p = _write(tmp_path, "a,cls,b\n1,u,2\n")
    ds = load_csv(p, "cls")
    assert ds.features.tolist() == [[1.0, 2.0]]


@pytest.mark.parametrize(
    "text, match",
    [
        ("a,b,y\n1,NaN,x\n", r"d.csv:2: column 'b'"),
        ("a,b,y\n1,2,x\n1,foo,x\n", r":3: column 'b': non-numeric"),
        ("a,b,y\n1,2,x\n\n3,4,x\n", r":3: empty row"),
        ("a,b,y\n1,2\n", r"expected 3 fields"),
        ("", r"header"),
        ("a,b,y\n", r"no data rows"),
        ("a,b\n1,2\n", r"label column 'y'"),
    ],
)
def test_load_errors(tmp_path, text, match):
    with pytest.raises(DataError, match=match):
        load_csv(_write(tmp_path, text), "y")


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv", "y")


def test_penguin_csv_roundtrip(tmp_path):
    datasets = pytest.importorskip("netclass.datasets")
    pytest.importorskip("palmerpenguins")
    raw = datasets.penguins_raw_path()
    assert sum(1 for _ in raw.open()) - 1 == 344
    # the raw file has categorical columns and NA cells, so the loader rejects it
    with pytest.raises(DataError):
        load_csv(raw, "species")
    ds = datasets.penguins()
    p = tmp_path / "penguins.csv"
    write_csv(ds, p, "species")
    back = load_csv(p, "species")
    assert back.n_samples == 342
    assert set(back.labels.tolist()) == {"Adelie", "Chinstrap", "Gentoo"}
    np.testing.assert_array_equal(back.features, ds.features)


def test_load_matrix_csv(tmp_path):
    p = _write(tmp_path, "a,b,y\n1,2,x\n3,4,z\n")
    X, names = load_matrix_csv(p, "y")
    assert X.tolist() == [[1, 2], [3, 4]] and names == ["a", "b"]
    p2 = _write(tmp_path, "a,b\n1,2\n", "q.csv")
    X, names = load_matrix_csv(p2, "y")
    assert X.tolist() == [[1, 2]]


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), ["a", "b"])
    with pytest.raises(DataError):
        Dataset(np.array([[np.inf]]), ["a"])


# --- normalisation -----------------------------------------------------------------


def test_minmax_column():
    p = fit_normalization(np.array([[0.0], [5.0], [10.0]]), "minmax")
    assert apply_normalization(p, [[0.0], [5.0], [10.0]]).ravel().tolist() == [0.0, 0.5, 1.0]


def test_none_is_identity(rng):
    X = rng.normal(size=(5, 3))
    p = fit_normalization(X, "none")
    assert np.array_equal(apply_normalization(p, X), X)


def test_no_clamping():
    p = fit_normalization(np.array([[0.0], [10.0]]), "minmax")
    assert apply_normalization(p, [[20.0]]).item() == 2.0


def test_constant_feature_maps_to_zero():
    X = np.array([[1.0, 3.0], [2.0, 3.0], [4.0, 3.0]])
    for scheme in ("minmax", "zscore"):
        Z = apply_normalization(fit_normalization(X, scheme), X)
        assert np.all(Z[:, 1] == 0.0)


def test_zscore_moments(rng):
    X = rng.normal(3.0, 2.0, size=(200, 4))
    Z = apply_normalization(fit_normalization(X, "zscore"), X)
    np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(Z.std(axis=0), 1.0, rtol=1e-12)


@pytest.mark.parametrize("scheme", ["none", "minmax", "zscore"])
def test_round_trip(rng, scheme):
    X = rng.normal(size=(30, 4)) * [1, 10, 1e-3, 100]
    X[:, 2] = 7.0  # constant column still inverts
    p = fit_normalization(X, scheme)
    back = invert_normalization(p, apply_normalization(p, X))
    np.testing.assert_allclose(back, X, rtol=1e-9, atol=1e-9)


def test_unknown_scheme():
    with pytest.raises(ConfigError):
        fit_normalization(np.zeros((2, 2)), "robust")


# --- stratified_kfold ------------------------------------------------------------


def test_single_class_even():
    plan = stratified_kfold(["a"] * 10, 5, seed=0)
    assert np.bincount(plan.assignments).tolist() == [2] * 5


def test_two_classes_even():
    labels = np.array(["A"] * 6 + ["B"] * 4)
    plan = stratified_kfold(labels, 2, seed=3)
    for f in range(2):
        held = labels[plan.test_index(f)]
        assert (held == "A").sum() == 3 and (held == "B").sum() == 2


def test_iris_folds():
    datasets = pytest.importorskip("netclass.datasets")
    pytest.importorskip("sklearn")
    ds = datasets.iris()
    plan = stratified_kfold(ds.labels, 10, seed=1)
    for f in range(10):
        held = ds.labels[plan.test_index(f)]
        assert sorted(np.unique(held, return_counts=True)[1].tolist()) == [5, 5, 5]


def test_partition_and_balance(rng):
    for trial in range(30):
        n = int(rng.integers(10, 200))
        k = int(rng.integers(2, 11))
        labels = rng.integers(0, 4, size=n)
        plan = stratified_kfold(labels, k, seed=trial)
        assert plan.assignments.shape == (n,)
        assert set(np.unique(plan.assignments)) == set(range(k))  # every fold non-empty
        for c in np.unique(labels):
            counts = np.bincount(plan.assignments[labels == c], minlength=k)
            assert counts.max() - counts.min() <= 1
        seen = np.concatenate([plan.test_index(f) for f in range(k)])
        assert sorted(seen.tolist()) == list(range(n))


def test_kfold_deterministic():
    labels = ["a", "b"] * 20
    assert np.array_equal(stratified_kfold(labels, 4, 9).assignments, stratified_kfold(labels, 4, 9).assignments)
    assert not np.array_equal(stratified_kfold(labels, 4, 9).assignments, stratified_kfold(labels, 4, 10).assignments)


def test_kfold_errors():
    with pytest.raises(ConfigError):
        stratified_kfold(["a"] * 3, 4)
    with pytest.raises(ConfigError):
        stratified_kfold(["a"] * 3, 1)


def test_stratified_subsample():
    labels = np.array(["p"] * 90 + ["q"] * 10)
    ds = Dataset(np.arange(100.0)[:, None], labels)
    sub = stratified_subsample(ds, 20, seed=1)
    assert sub.label_histogram() == {"p": 18, "q": 2}
    assert np.all(np.diff(sub.features[:, 0]) > 0)
    assert np.array_equal(sub.features, stratified_subsample(ds, 20, seed=1).features)


# --- generate_blobs -----------------------------------------------------------------


def test_two_blobs_shape():
    ds = two_blobs(seed=0)
    assert ds.features.shape == (100, 2)
    assert ds.label_histogram() == {"1": 50, "2": 50}


def test_tiny_sigma_hits_mean():
    ds = generate_blobs([BlobSpec([2.0, -3.0], [1e-12, 1e-12], 20, 4)])
    np.testing.assert_allclose(ds.features.mean(axis=0), [2.0, -3.0], atol=1e-6)


def test_blobs_reproducible():
    a = two_blobs(seed=5)
    b = two_blobs(seed=5)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)


def test_blob_statistics():
    ds = generate_blobs(
        [BlobSpec([1, 1], [0.5, 0.5], 10_000, 11), BlobSpec([5, 5], [0.4, 0.4], 10_000, 12)]
    )
    for label, mu, sigma in (("0", 1.0, 0.5), ("1", 5.0, 0.4)):
        X = ds.features[ds.labels == label]
        assert np.all(np.abs(X.mean(axis=0) - mu) < 0.05)
        assert np.all(np.abs(X.std(axis=0, ddof=1) - sigma) < 0.05)


def test_blob_errors():
    with pytest.raises(ConfigError):
        generate_blobs([BlobSpec([0, 0], [0.0, 1.0], 5, 0)])
    with pytest.raises(ConfigError):
        generate_blobs([BlobSpec([0, 0], [1, 1], 5, 0), BlobSpec([0], [1], 5, 0)])


def test_htru2_loader_formats(tmp_path, monkeypatch):
    datasets = pytest.importorskip("netclass.datasets")
    raw = tmp_path / "HTRU_2.csv"
    raw.write_text("1,2,3,4,5,6,7,8,0\n2,3,4,5,6,7,8,9,1\n0.5,2,3,4,5,6,7,8,0\n")
    ds = datasets.htru2(raw)
    assert ds.features.shape == (3, 8) and ds.labels.tolist() == ["0", "1", "0"]
    monkeypatch.setenv(datasets.HTRU2_ENV, str(raw))
    assert datasets.htru2().fingerprint() == ds.fingerprint()
    headed = tmp_path / "h.csv"
    headed.write_text("a,b,class\n1,2,0\n3,4,1\n")
    assert datasets.htru2(headed).labels.tolist() == ["0", "1"]
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n")
    with pytest.raises(DataError, match="9 columns"):
        datasets.htru2(bad)
    monkeypatch.delenv(datasets.HTRU2_ENV)
    with pytest.raises(DataError, match=datasets.HTRU2_ENV):
        datasets.htru2()
