"""Shared fixtures: real-dataset CSVs materialized once per session.

scikit-learn is a test-only dependency used to fetch the bundled Wine and
Digits tables; the package under test never imports it.
"""

import csv

import numpy as np
import pytest


def _write_csv(path, x, y):
    """Write samples-as-rows features plus an integer label column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(x.shape[1])] + ["label"])
        for row, label in zip(x, y):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


@pytest.fixture(scope="session")
def wine_csv(tmp_path_factory):
    """Wine: 178 samples, 13 features, 3 classes."""
    from sklearn.datasets import load_wine

    data = load_wine()
    path = tmp_path_factory.mktemp("data") / "wine.csv"
    _write_csv(path, data.data, data.target)
    return str(path)


@pytest.fixture(scope="session")
def digits500_csv(tmp_path_factory):
    """Stratified 500-sample Digits subsample: 50 per class, 64 features."""
    from sklearn.datasets import load_digits

    data = load_digits()
    rng = np.random.default_rng(0)
    keep = []
    for c in range(10):
        idx = np.flatnonzero(data.target == c)
        keep.extend(rng.permutation(idx)[:50])
    keep = np.sort(np.asarray(keep))
    path = tmp_path_factory.mktemp("data") / "digits500.csv"
    _write_csv(path, data.data[keep], data.target[keep])
    return str(path)
