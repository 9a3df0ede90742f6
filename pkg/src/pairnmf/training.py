"""Pairwise training orchestration: class-pair subsets, stratified
cross-validation folds, chromosome fitness evaluation, and final model
fitting for both strategies (per-class-pair and whole-dataset).

Fitness evaluation caches per-(fold, pair, penalty-weight) vote vectors:
each pair's predictions depend only on its own gene, so successive
chromosomes that share gene values (the common case under one-point
crossover) reuse prior factorizations. Per-pair solver seeds are derived
from (base seed, fold, pair index) only, never from the gene value, so the
cache is exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .classify import LatentModel, PairModel, knn_label, project
from .errors import ContractViolation, SingularMatrixError
from .linalg import DEFAULT_RIDGE
from .seeds import derive_seed
from .solvers import SolverConfig, build_graph, frnmf_solve, gnmf_solve

logger = logging.getLogger(__name__)

ALGOS = ("gnmf", "frnmf")
DEFAULT_GRAPH_NEIGHBORS = 5


@dataclass
class LabeledDataset:
    """Feature matrix (d, n) with values in [0, 1] plus integer labels."""

    x: np.ndarray
    y: np.ndarray
    classes: list = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.ndim != 2:
            raise ContractViolation("features must be a 2-D (d, n) matrix")
        if self.y.shape != (self.x.shape[1],):
            raise ContractViolation(
                f"label count {self.y.shape} does not match {self.x.shape[1]} samples"
            )
        if not np.all(np.isfinite(self.x)):
            raise ContractViolation("features contain NaN or infinite values")
        if self.x.size and (self.x.min() < 0.0 or self.x.max() > 1.0):
            raise ContractViolation("features must be scaled to [0, 1]")
        observed = sorted(int(c) for c in np.unique(self.y))
        if self.classes is None:
            self.classes = observed
        elif sorted(int(c) for c in self.classes) != observed:
            raise ContractViolation("class inventory does not match labels")

    @property
    def n_samples(self) -> int:
        return self.x.shape[1]

    @property
    def n_features(self) -> int:
        return self.x.shape[0]


@dataclass
class PairIndex:
    pairs: list  # ordered (class_a, class_b) with class_a < class_b


@dataclass
class FoldPlan:
    n_folds: int
    assignments: np.ndarray  # fold id per sample
    seed: int


@dataclass
class TrainedEnsemble:
    models: list
    chromosome: np.ndarray
    strategy: str  # "cnmf" | "unmf"
    algo: str  # "gnmf" | "frnmf"
    rank: int


def enumerate_pairs(classes) -> PairIndex:
    """All unordered class pairs in lexicographic order."""
    classes = sorted(int(c) for c in classes)
    if len(classes) < 2:
        raise ContractViolation("need at least 2 classes to form pairs")
    if len(set(classes)) != len(classes):
        raise ContractViolation("duplicate class labels")
    pairs = [
        (classes[i], classes[j])
        for i in range(len(classes))
        for j in range(i + 1, len(classes))
    ]
    return PairIndex(pairs)


def subset(data: LabeledDataset, pair) -> LabeledDataset:
    """Columns of ``data`` restricted to the two classes, order preserved."""
    a, b = pair
    for c in (a, b):
        if c not in data.classes:
            raise ContractViolation(f"class {c} not present in dataset")
    mask = (data.y == a) | (data.y == b)
    return LabeledDataset(data.x[:, mask], data.y[mask], sorted((a, b)))


def make_folds(data: LabeledDataset, n_folds: int, seed: int) -> FoldPlan:
    """Stratified fold assignment; per class, fold sizes differ by at most 1."""
    if n_folds < 2:
        raise ContractViolation("n_folds must be >= 2")
    rng = np.random.default_rng(seed)
    assignments = np.empty(data.n_samples, dtype=np.int64)
    for c in data.classes:
        idx = np.flatnonzero(data.y == c)
        if idx.size < n_folds:
            raise ContractViolation(
                f"class {c} has {idx.size} samples, fewer than n_folds={n_folds}"
            )
        perm = rng.permutation(idx)
        assignments[perm] = np.arange(idx.size) % n_folds
    return FoldPlan(n_folds, assignments, seed)


def _fit_latent(x_sub, algo, lam, cfg: SolverConfig, graph_k: int):
    """Dispatch one subset factorization; the neighbor count is clamped to
    the subset size where necessary."""
    if algo == "gnmf":
        k = min(graph_k, x_sub.shape[1] - 1)
        graph = build_graph(x_sub, k)
        return gnmf_solve(x_sub, graph, lam, cfg)
    if algo == "frnmf":
        return frnmf_solve(x_sub, lam, cfg)
    raise ContractViolation(f"unknown algorithm {algo!r}; expected one of {ALGOS}")


def _knn1_indices(h_train, latents):
    """Index of the nearest training column for each latent column.

    Distance ties resolve to the lower column index (argmin semantics),
    matching :func:`pairnmf.classify.knn_label`.
    """
    d2 = np.sum((h_train[:, :, None] - latents[:, None, :]) ** 2, axis=0)
    return np.argmin(d2, axis=0)


def _majority_indices(votes: np.ndarray, n_classes: int) -> np.ndarray:
    """Column-wise majority of a (T, m) matrix of class indices.

    Entries of -1 (skipped pairs) are ignored; count ties resolve to the
    smallest class index.
    """
    t_len, m = votes.shape
    counts = np.zeros((n_classes, m), dtype=np.int64)
    valid = votes >= 0
    cols = np.broadcast_to(np.arange(m), (t_len, m))
    np.add.at(counts, (votes[valid], cols[valid]), 1)
    return np.argmax(counts, axis=0)


class _FoldContext:
    """Per-fold training subsets and validation block, precomputed once."""

    def __init__(self, data, fold_plan, fold, pairs, class_to_index):
        train_mask = fold_plan.assignments != fold
        val_mask = ~train_mask
        self.x_val = np.ascontiguousarray(data.x[:, val_mask])
        self.y_val_idx = np.array(
            [class_to_index[int(c)] for c in data.y[val_mask]], dtype=np.int64
        )
        self.train_x = np.ascontiguousarray(data.x[:, train_mask])
        self.train_y = data.y[train_mask]
        self.pair_blocks = []
        for a, b in pairs:
            sel = (self.train_y == a) | (self.train_y == b)
            self.pair_blocks.append(
                (np.ascontiguousarray(self.train_x[:, sel]), self.train_y[sel])
            )


class PairwiseEvaluator:
    """Cross-validated fitness of a per-pair penalty-weight chromosome."""

    def __init__(
        self,
        data: LabeledDataset,
        algo: str,
        rank: int,
        folds: FoldPlan,
        solver_cfg: SolverConfig,
        knn_k: int = 1,
        ridge: float = DEFAULT_RIDGE,
        graph_k: int = DEFAULT_GRAPH_NEIGHBORS,
    ):
        self.data = data
        self.algo = algo
        self.cfg = replace(solver_cfg, rank=rank)
        self.folds = folds
        self.knn_k = knn_k
        self.ridge = ridge
        self.graph_k = graph_k
        self.pairs = enumerate_pairs(data.classes).pairs
        self.class_to_index = {int(c): i for i, c in enumerate(data.classes)}
        self._contexts = [
            _FoldContext(data, folds, f, self.pairs, self.class_to_index)
            for f in range(folds.n_folds)
        ]
        self._vote_cache: dict = {}

    @property
    def t_len(self) -> int:
        return len(self.pairs)

    def _pair_votes(self, fold: int, pair_idx: int, lam: float) -> np.ndarray:
        key = (fold, pair_idx, float(lam))
        cached = self._vote_cache.get(key)
        if cached is not None:
            return cached
        ctx = self._contexts[fold]
        x_sub, y_sub = ctx.pair_blocks[pair_idx]
        cfg = replace(
            self.cfg, seed=derive_seed(self.cfg.seed, "fold", fold, "pair", pair_idx)
        )
        fitted = _fit_latent(x_sub, self.algo, float(lam), cfg, self.graph_k)
        votes = np.full(ctx.x_val.shape[1], -1, dtype=np.int64)
        try:
            latents = project(fitted.w, ctx.x_val, self.ridge)
        except SingularMatrixError:
            logger.warning(
                "fold %d pair %d: singular projection, pair casts no votes",
                fold,
                pair_idx,
            )
        else:
            if self.knn_k == 1:
                nearest = _knn1_indices(fitted.h, latents)
                pred = y_sub[nearest]
            else:
                model = LatentModel(fitted.w, fitted.h, y_sub, float(lam))
                pred = np.array(
                    [
                        knn_label(latents[:, j], model, self.knn_k)
                        for j in range(latents.shape[1])
                    ]
                )
            votes = np.array(
                [self.class_to_index[int(c)] for c in pred], dtype=np.int64
            )
        self._vote_cache[key] = votes
        return votes

    def evaluate(self, genes) -> float:
        """Mean validation accuracy across folds for one chromosome."""
        genes = np.asarray(genes, dtype=np.float64)
        if genes.shape != (self.t_len,):
            raise ContractViolation(
                f"chromosome length {genes.shape} != pair count {self.t_len}"
            )
        accs = []
        n_classes = len(self.data.classes)
        for fold, ctx in enumerate(self._contexts):
            votes = np.stack(
                [self._pair_votes(fold, t, genes[t]) for t in range(self.t_len)]
            )
            pred = _majority_indices(votes, n_classes)
            accs.append(float(np.mean(pred == ctx.y_val_idx)))
        return float(np.mean(accs))


class UnmfEvaluator:
    """Cross-validated accuracy of the whole-dataset (single factorization)
    strategy; structurally identical to :class:`PairwiseEvaluator` with one
    'pair' covering all classes and no voting."""

    def __init__(
        self,
        data: LabeledDataset,
        algo: str,
        rank: int,
        folds: FoldPlan,
        solver_cfg: SolverConfig,
        knn_k: int = 1,
        ridge: float = DEFAULT_RIDGE,
        graph_k: int = DEFAULT_GRAPH_NEIGHBORS,
    ):
        self.data = data
        self.algo = algo
        self.cfg = replace(solver_cfg, rank=rank)
        self.folds = folds
        self.knn_k = knn_k
        self.ridge = ridge
        self.graph_k = graph_k
        self.class_to_index = {int(c): i for i, c in enumerate(data.classes)}
        self._contexts = [
            _FoldContext(data, folds, f, [], self.class_to_index)
            for f in range(folds.n_folds)
        ]
        self._acc_cache: dict = {}

    @property
    def t_len(self) -> int:
        return 1

    def evaluate(self, genes) -> float:
        genes = np.asarray(genes, dtype=np.float64).ravel()
        if genes.shape != (1,):
            raise ContractViolation("whole-dataset strategy takes a single gene")
        lam = float(genes[0])
        cached = self._acc_cache.get(lam)
        if cached is not None:
            return cached
        accs = []
        for fold, ctx in enumerate(self._contexts):
            cfg = replace(
                self.cfg, seed=derive_seed(self.cfg.seed, "fold", fold, "pair", 0)
            )
            fitted = _fit_latent(ctx.train_x, self.algo, lam, cfg, self.graph_k)
            latents = project(fitted.w, ctx.x_val, self.ridge)
            if self.knn_k == 1:
                pred = ctx.train_y[_knn1_indices(fitted.h, latents)]
            else:
                model = LatentModel(fitted.w, fitted.h, ctx.train_y, lam)
                pred = np.array(
                    [
                        knn_label(latents[:, j], model, self.knn_k)
                        for j in range(latents.shape[1])
                    ]
                )
            pred_idx = np.array(
                [self.class_to_index[int(c)] for c in pred], dtype=np.int64
            )
            accs.append(float(np.mean(pred_idx == ctx.y_val_idx)))
        acc = float(np.mean(accs))
        self._acc_cache[lam] = acc
        return acc


def evaluate_chromosome(
    data: LabeledDataset,
    chromosome,
    algo: str,
    rank: int,
    folds: FoldPlan,
    solver_cfg: SolverConfig,
    **kwargs,
) -> float:
    """One-shot cross-validated fitness of a chromosome (see
    :class:`PairwiseEvaluator` for the reusable, caching form)."""
    return PairwiseEvaluator(data, algo, rank, folds, solver_cfg, **kwargs).evaluate(
        chromosome
    )


def evaluate_unmf(
    data: LabeledDataset,
    lam: float,
    algo: str,
    rank: int,
    folds: FoldPlan,
    solver_cfg: SolverConfig,
    **kwargs,
) -> float:
    """One-shot cross-validated accuracy of the whole-dataset strategy."""
    if not 0.0 <= lam <= 1.0:
        raise ContractViolation("lam must be in [0, 1]")
    return UnmfEvaluator(data, algo, rank, folds, solver_cfg, **kwargs).evaluate([lam])


def fit_final(
    data: LabeledDataset,
    best_chromosome,
    algo: str,
    rank: int,
    solver_cfg: SolverConfig,
    strategy: str = "cnmf",
    graph_k: int = DEFAULT_GRAPH_NEIGHBORS,
) -> TrainedEnsemble:
    """Refit every model on the full training split with the tuned weights."""
    chromosome = np.asarray(best_chromosome, dtype=np.float64)
    cfg = replace(solver_cfg, rank=rank)
    models = []
    if strategy == "cnmf":
        pairs = enumerate_pairs(data.classes).pairs
        if chromosome.shape != (len(pairs),):
            raise ContractViolation(
                f"chromosome length {chromosome.shape} != pair count {len(pairs)}"
            )
        for t, (a, b) in enumerate(pairs):
            sub = subset(data, (a, b))
            sub_cfg = replace(cfg, seed=derive_seed(cfg.seed, "final", t))
            fitted = _fit_latent(sub.x, algo, float(chromosome[t]), sub_cfg, graph_k)
            models.append(
                PairModel(fitted.w, fitted.h, sub.y, float(chromosome[t]), a, b)
            )
    elif strategy == "unmf":
        if chromosome.shape != (1,):
            raise ContractViolation("whole-dataset strategy takes a single gene")
        sub_cfg = replace(cfg, seed=derive_seed(cfg.seed, "final", 0))
        fitted = _fit_latent(data.x, algo, float(chromosome[0]), sub_cfg, graph_k)
        models.append(LatentModel(fitted.w, fitted.h, data.y, float(chromosome[0])))
    else:
        raise ContractViolation(f"unknown strategy {strategy!r}")
    return TrainedEnsemble(models, chromosome, strategy, algo, rank)
