"""CSV ingestion, synthetic blobs, scaling, selection, and splitting."""

import numpy as np
import pytest

from pairnmf import (
    BlobSpec,
    DataError,
    RawTable,
    load_csv,
    make_blobs,
    minmax_scale,
    select_k_best,
    train_test_split,
)
from pairnmf.errors import ContractViolation


# ---------------------------------------------------------------- load_csv


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_csv_basic(tmp_path):
    path = _write(tmp_path, "a,b,label\n1.0,2.0,0\n3.0,4.0,1\n")
    table = load_csv(path, "label")
    assert table.features.shape == (2, 2)  # features x samples
    assert np.array_equal(table.features, [[1.0, 3.0], [2.0, 4.0]])
    assert np.array_equal(table.labels, [0, 1])
    assert table.feature_names == ["a", "b"]


def test_load_csv_label_column_position_free(tmp_path):
    path = _write(tmp_path, "label,a\n2,0.5\n1,0.7\n")
    table = load_csv(path, "label")
    assert np.array_equal(table.labels, [2, 1])
    assert np.array_equal(table.features, [[0.5, 0.7]])


def test_load_csv_missing_file():
    with pytest.raises(DataError, match="not found"):
        load_csv("/no/such/file.csv", "label")


def test_load_csv_missing_label_column(tmp_path):
    path = _write(tmp_path, "a,b\n1,2\n")
    with pytest.raises(DataError, match="label"):
        load_csv(path, "label")


def test_load_csv_reports_row_and_column_of_bad_cell(tmp_path):
    path = _write(tmp_path, "a,label\n1.0,0\nbogus,1\n")
    with pytest.raises(DataError, match=r"row 3.*'a'.*bogus"):
        load_csv(path, "label")


def test_load_csv_ragged_row(tmp_path):
    path = _write(tmp_path, "a,b,label\n1,2,0\n1,2\n")
    with pytest.raises(DataError, match="row 3"):
        load_csv(path, "label")


def test_load_csv_non_integer_label(tmp_path):
    path = _write(tmp_path, "a,label\n1.0,0.5\n")
    with pytest.raises(DataError, match="non-integer label"):
        load_csv(path, "label")


def test_load_csv_empty_and_header_only(tmp_path):
    with pytest.raises(DataError, match="empty"):
        load_csv(_write(tmp_path, "", "e.csv"), "label")
    with pytest.raises(DataError, match="no data rows"):
        load_csv(_write(tmp_path, "a,label\n", "h.csv"), "label")


# -------------------------------------------------------------- make_blobs


def test_make_blobs_shapes_and_label_balance():
    table = make_blobs(BlobSpec(n_centers=3, n_features=10))
    assert table.features.shape == (10, 1000)
    assert np.array_equal(np.unique(table.labels), [0, 1, 2])
    counts = np.bincount(table.labels)
    assert counts.max() - counts.min() <= 1


def test_make_blobs_deterministic_and_seed_sensitive():
    spec = BlobSpec(n_centers=2, n_features=4, n_samples=50)
    a = make_blobs(spec)
    b = make_blobs(spec)
    c = make_blobs(BlobSpec(n_centers=2, n_features=4, n_samples=50, seed=1))
    assert np.array_equal(a.features, b.features)
    assert not np.array_equal(a.features, c.features)


def test_make_blobs_clusters_around_centers():
    table = make_blobs(
        BlobSpec(n_centers=2, n_features=3, n_samples=2000, cluster_std=0.1)
    )
    for c in (0, 1):
        block = table.features[:, table.labels == c]
        assert np.all(np.std(block, axis=1) < 0.2)
        assert np.all(block.mean(axis=1) > 0.5) and np.all(block.mean(axis=1) < 5.5)


def test_blob_spec_validation():
    with pytest.raises(ContractViolation):
        BlobSpec(n_centers=0, n_features=5)
    with pytest.raises(ContractViolation):
        BlobSpec(n_centers=2, n_features=5, center_box=(5.0, 1.0))


# ------------------------------------------------------------ minmax_scale


def test_minmax_scale_maps_each_feature_to_unit_interval():
    table = RawTable(np.array([[1.0, 3.0, 5.0], [-2.0, 0.0, 2.0]]), np.array([0, 1, 0]))
    data = minmax_scale(table)
    assert np.array_equal(data.x, [[0.0, 0.5, 1.0], [0.0, 0.5, 1.0]])
    assert np.array_equal(data.y, table.labels)


def test_minmax_scale_constant_feature_maps_to_zero():
    table = RawTable(np.array([[7.0, 7.0], [0.0, 1.0]]), np.array([0, 1]))
    data = minmax_scale(table)
    assert np.array_equal(data.x[0], [0.0, 0.0])


def test_minmax_scale_rejects_non_finite():
    with pytest.raises(DataError):
        minmax_scale(RawTable(np.array([[np.nan, 1.0]]), np.array([0, 1])))


# ----------------------------------------------------------- select_k_best


def test_select_k_best_prefers_separating_feature():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1], 30)
    noise = rng.standard_normal((4, 60))
    signal = np.where(y == 0, 0.0, 10.0) + 0.1 * rng.standard_normal(60)
    table = RawTable(np.vstack([noise[:2], signal, noise[2:]]), y,
                     ["n0", "n1", "sig", "n2", "n3"])
    out = select_k_best(table, 1)
    assert out.feature_names == ["sig"]
    assert np.array_equal(out.features[0], signal)


def test_select_k_best_k_equals_d_is_identity():
    rng = np.random.default_rng(1)
    table = RawTable(rng.random((5, 20)), rng.integers(0, 2, 20))
    out = select_k_best(table, 5)
    assert np.array_equal(out.features, table.features)


def test_select_k_best_preserves_original_feature_order():
    y = np.repeat([0, 1], 10)
    f0 = np.where(y == 0, 0.0, 1.0) + 0.01 * np.arange(20)  # weaker
    f1 = np.where(y == 0, 0.0, 100.0)  # stronger, higher index
    table = RawTable(np.vstack([f0, f1]), y, ["f0", "f1"])
    out = select_k_best(table, 2)
    assert out.feature_names == ["f0", "f1"]  # not reordered by score


def test_select_k_best_validates_k_and_classes():
    table = RawTable(np.zeros((3, 4)), np.array([0, 1, 0, 1]))
    with pytest.raises(ContractViolation):
        select_k_best(table, 0)
    with pytest.raises(ContractViolation):
        select_k_best(table, 4)
    single = RawTable(np.zeros((3, 4)), np.zeros(4, dtype=int))
    with pytest.raises(ContractViolation):
        select_k_best(single, 2)


# -------------------------------------------------------- train_test_split


def _unit_dataset(n_per_class, n_classes=3, d=4, seed=0):
    from pairnmf import LabeledDataset

    rng = np.random.default_rng(seed)
    n = n_per_class * n_classes
    return LabeledDataset(rng.random((d, n)), np.arange(n) % n_classes)


def test_split_disjoint_exhaustive_stratified():
    data = _unit_dataset(20)
    train, test = train_test_split(data, 0.3, seed=0)
    assert train.n_samples + test.n_samples == data.n_samples
    for c in data.classes:
        assert np.sum(test.y == c) == 6
        assert np.sum(train.y == c) == 14
    # disjoint: the union of columns reproduces the dataset exactly
    combined = np.sort(np.concatenate([train.x[0], test.x[0]]))
    assert np.array_equal(combined, np.sort(data.x[0]))


def test_split_deterministic_per_seed():
    data = _unit_dataset(10)
    a_train, _ = train_test_split(data, 0.3, seed=5)
    b_train, _ = train_test_split(data, 0.3, seed=5)
    c_train, _ = train_test_split(data, 0.3, seed=6)
    assert np.array_equal(a_train.x, b_train.x)
    assert not np.array_equal(a_train.x, c_train.x)


def test_split_keeps_at_least_one_sample_per_side():
    data = _unit_dataset(2)
    train, test = train_test_split(data, 0.01, seed=0)
    for c in data.classes:
        assert np.sum(test.y == c) == 1
        assert np.sum(train.y == c) == 1


def test_split_validates_inputs():
    data = _unit_dataset(5)
    with pytest.raises(ContractViolation):
        train_test_split(data, 0.0, seed=0)
    with pytest.raises(ContractViolation):
        train_test_split(data, 1.0, seed=0)
