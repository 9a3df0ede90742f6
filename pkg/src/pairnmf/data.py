"""Dataset ingestion and preparation: CSV loading, synthetic Gaussian blob
generation, min-max scaling, univariate feature selection, and stratified
train/test splitting.

Canonical on-disk format: headered CSV, one sample per row, numeric
feature columns, integer labels in a named column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractViolation, DataError
from .training import LabeledDataset


@dataclass
class RawTable:
    """Pre-scaling feature table; values may be negative."""

    features: np.ndarray  # (d, n)
    labels: np.ndarray  # (n,)
    feature_names: Optional[list] = None


@dataclass(frozen=True)
class BlobSpec:
    """Isotropic Gaussian blob recipe: uniform centers in center_box^f,
    1000 samples split evenly (round-robin) across centers, sigma 1."""

    n_centers: int
    n_features: int
    n_samples: int = 1000
    cluster_std: float = 1.0
    center_box: tuple = (1.0, 5.0)
    seed: int = 0

    def __post_init__(self):
        if min(self.n_centers, self.n_features, self.n_samples) < 1:
            raise ContractViolation("blob counts must be >= 1")
        if not self.center_box[0] < self.center_box[1]:
            raise ContractViolation("center_box must satisfy low < high")


def load_csv(path, label_column: str) -> RawTable:
    """Parse a headered CSV into a feature matrix and label vector."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        header = [name.strip() for name in header]
        if label_column not in header:
            raise DataError(
                f"{path}: label column {label_column!r} not in header {header}"
            )
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows = []
        labels = []
        for row_num, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}"
                )
            values = []
            for col_idx, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: malformed cell at row {row_num}, "
                        f"column {header[col_idx]!r}: {cell!r}"
                    ) from None
                if col_idx == label_idx:
                    if value != int(value):
                        raise DataError(
                            f"{path}: non-integer label at row {row_num}: {cell!r}"
                        )
                    labels.append(int(value))
                else:
                    values.append(value)
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    features = np.asarray(rows, dtype=np.float64).T  # samples as columns
    return RawTable(features, np.asarray(labels, dtype=np.int64), feature_names)


def make_blobs(spec: BlobSpec) -> RawTable:
    """Deterministic synthetic blobs: centers i.i.d. uniform in the box,
    samples Gaussian around their round-robin-assigned center."""
    rng = np.random.default_rng(spec.seed)
    low, high = spec.center_box
    centers = rng.uniform(low, high, size=(spec.n_centers, spec.n_features))
    labels = np.arange(spec.n_samples, dtype=np.int64) % spec.n_centers
    noise = rng.normal(0.0, spec.cluster_std, size=(spec.n_samples, spec.n_features))
    samples = centers[labels] + noise
    return RawTable(samples.T, labels)


def minmax_scale(table: RawTable) -> LabeledDataset:
    """Affine per-feature map onto [0, 1]; constant features map to 0."""
    x = np.asarray(table.features, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DataError("features contain NaN or infinite values")
    lo = x.min(axis=1, keepdims=True)
    span = x.max(axis=1, keepdims=True) - lo
    scaled = np.where(span > 0, (x - lo) / np.where(span > 0, span, 1.0), 0.0)
    return LabeledDataset(scaled, table.labels)


def select_k_best(table: RawTable, k: int) -> RawTable:
    """Keep the k features with the highest one-way ANOVA F-statistic
    between classes; ties go to the lower feature index, original feature
    order is preserved."""
    d = table.features.shape[0]
    if not 1 <= k <= d:
        raise ContractViolation(f"k must be in [1, d], got {k} for d={d}")
    x = table.features
    y = table.labels
    classes = np.unique(y)
    n = x.shape[1]
    m = len(classes)
    if m < 2:
        raise ContractViolation("feature selection needs at least 2 classes")
    grand = x.mean(axis=1)
    ssb = np.zeros(d)
    ssw = np.zeros(d)
    for c in classes:
        block = x[:, y == c]
        mean_c = block.mean(axis=1)
        ssb += block.shape[1] * (mean_c - grand) ** 2
        ssw += np.sum((block - mean_c[:, None]) ** 2, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        f_stat = (ssb / (m - 1)) / (ssw / max(n - m, 1))
    f_stat = np.where(ssw == 0, np.where(ssb > 0, np.inf, 0.0), f_stat)
    order = np.argsort(-f_stat, kind="stable")[:k]
    keep = np.sort(order)
    names = (
        [table.feature_names[i] for i in keep] if table.feature_names else None
    )
    return RawTable(table.features[keep], table.labels, names)


def train_test_split(data: LabeledDataset, test_fraction: float, seed: int):
    """Stratified, seeded split into (train, test); exhaustive and disjoint.

    Within each split the original column order is preserved.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ContractViolation("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(data.n_samples, dtype=bool)
    for c in data.classes:
        idx = np.flatnonzero(data.y == c)
        if idx.size < 2:
            raise ContractViolation(
                f"class {c} has {idx.size} samples, need >= 2 to split"
            )
        n_test = int(round(idx.size * test_fraction))
        n_test = min(max(n_test, 1), idx.size - 1)
        chosen = rng.permutation(idx)[:n_test]
        test_mask[chosen] = True
    train = LabeledDataset(data.x[:, ~test_mask], data.y[~test_mask], data.classes)
    test = LabeledDataset(data.x[:, test_mask], data.y[test_mask], data.classes)
    return train, test
