"""Latent-space classification: pseudo-inverse projection, nearest-neighbor
labeling against a trained model's coefficient columns, and majority voting
across per-pair predictions.

Tie rules (deterministic, seed-independent): nearest-neighbor distance ties
go to the lower column index; vote ties go to the smallest label value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, SingularMatrixError
from .linalg import DEFAULT_RIDGE, solve_spd

logger = logging.getLogger(__name__)


@dataclass
class LatentModel:
    """Trained factors for one subset plus the training labels of H's columns."""

    w: np.ndarray  # (d, r) basis
    h: np.ndarray  # (r, n_t) latent codes of the training samples
    labels: np.ndarray  # (n_t,) integer labels
    lam: float


@dataclass
class PairModel(LatentModel):
    """A :class:`LatentModel` restricted to one unordered class pair."""

    class_a: int = 0
    class_b: int = 0

    def __post_init__(self):
        if not self.class_a < self.class_b:
            raise ContractViolation(
                f"pair classes must satisfy class_a < class_b, got "
                f"({self.class_a}, {self.class_b})"
            )


@dataclass
class VoteTally:
    counts: dict
    winner: int


def project(w: np.ndarray, x: np.ndarray, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Least-squares latent coordinates of ``x`` in the basis ``w``.

    Solves the normal equations (W^T W) h = W^T x; the result may contain
    negative values. ``x`` may be a vector or a (d, m) batch of columns.
    """
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != w.shape[0]:
        raise ContractViolation(
            f"sample has {x.shape[0]} features, basis expects {w.shape[0]}"
        )
    return solve_spd(w.T @ w, w.T @ x, ridge)


def knn_label(h: np.ndarray, model: LatentModel, k: int = 1) -> int:
    """Label of ``h`` by its k nearest columns of ``model.h`` (Euclidean)."""
    h = np.asarray(h, dtype=np.float64).ravel()
    n_t = model.h.shape[1]
    if k < 1 or k > n_t:
        raise ContractViolation(f"k must be in [1, n_t], got {k} for n_t={n_t}")
    dist_sq = np.sum((model.h - h[:, None]) ** 2, axis=0)
    if k == 1:
        return int(model.labels[int(np.argmin(dist_sq))])
    nearest = np.argsort(dist_sq, kind="stable")[:k]
    return majority_vote([int(model.labels[i]) for i in nearest]).winner


def majority_vote(votes) -> VoteTally:
    """Most frequent label; ties resolved toward the smallest label value."""
    votes = list(votes)
    if not votes:
        raise ContractViolation("majority_vote requires at least one vote")
    counts: dict = {}
    for v in votes:
        counts[v] = counts.get(v, 0) + 1
    best = max(counts.items(), key=lambda item: (item[1], -item[0]))
    return VoteTally(counts, best[0])


def predict(
    x: np.ndarray,
    models: list,
    k: int = 1,
    ridge: float = DEFAULT_RIDGE,
) -> int:
    """One-vs-one prediction: project + kNN against every pair model, then
    majority-vote the per-pair labels.

    A pair whose normal equations are singular even after the ridge casts
    no vote (logged) instead of aborting the prediction.
    """
    if not models:
        raise ContractViolation("predict requires at least one model")
    votes = []
    for idx, model in enumerate(models):
        try:
            latent = project(model.w, x, ridge)
        except SingularMatrixError:
            logger.warning("skipping pair model %d: singular projection", idx)
            continue
        votes.append(knn_label(latent, model, k))
    if not votes:
        raise SingularMatrixError("every pair model had a singular projection")
    return majority_vote(votes).winner


def predict_single(
    x: np.ndarray,
    model: LatentModel,
    k: int = 1,
    ridge: float = DEFAULT_RIDGE,
) -> int:
    """Whole-dataset strategy: direct kNN labeling, no voting."""
    return knn_label(project(model.w, x, ridge), model, k)
