"""Factorization solvers: base NMF, graph-regularized NMF, and
feature-relationship NMF, all driven by multiplicative updates.

Each solver alternates an H sweep and a W sweep until the relative change
of its objective falls below ``rel_tol`` or ``max_iters`` is reached. The
objective trace is recorded once per full sweep, with index 0 holding the
post-initialization value.

With ``lam == 0`` both penalized solvers execute the exact base-NMF
arithmetic, so their traces are bitwise identical to :func:`nmf_solve` for
the same seed. To keep that reduction exact, the graph-regularized
objective is recorded as half the usual form
(``0.5*||X-WH||^2 + 0.5*lam*Tr(HLH^T)``, same minimizer) and the
feature-relationship objective omits the W-independent constant
``0.5*||XX^T||_F^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from ._backend import active_kernels
from .errors import ContractViolation
from .linalg import DEFAULT_EPS, as_nonneg_matrix, as_real_matrix


@dataclass(frozen=True)
class SolverConfig:
    """Shared solver knobs: target rank, iteration cap, stopping tolerance,
    and the PRNG seed used for factor initialization."""

    rank: int
    max_iters: int = 200
    rel_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ContractViolation("rank must be >= 1")
        if self.max_iters < 1:
            raise ContractViolation("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ContractViolation("rel_tol must be > 0")


@dataclass
class FactorPair:
    """A (W, H) factor pair plus the per-sweep objective trace."""

    w: np.ndarray
    h: np.ndarray
    objective_trace: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class NeighborGraph:
    """Symmetrized k-NN similarity graph over dataset columns."""

    weights: np.ndarray  # symmetric (n, n), 0/1 entries, zero diagonal
    degree: np.ndarray  # (n,) row sums of weights
    laplacian: np.ndarray  # diag(degree) - weights


def init_factors(d: int, n: int, config: SolverConfig) -> FactorPair:
    """Random factors with entries i.i.d. uniform in (0, 1], seeded."""
    if d < 1 or n < 1:
        raise ContractViolation("factor dimensions must be >= 1")
    rng = np.random.default_rng(config.seed)
    w = 1.0 - rng.random((d, config.rank))
    h = 1.0 - rng.random((config.rank, n))
    return FactorPair(w, h)


def nmf_solve(x, config: SolverConfig) -> FactorPair:
    """Base NMF by Lee-Seung multiplicative updates (H sweep then W sweep)."""
    x = as_nonneg_matrix(x, "x")
    pair = init_factors(x.shape[0], x.shape[1], config)
    kern = active_kernels()
    w, h, trace = kern.nmf_sweeps(
        x, pair.w, pair.h, config.max_iters, config.rel_tol, DEFAULT_EPS
    )
    return FactorPair(w, h, trace)


def build_graph(x, k_neighbors: int) -> NeighborGraph:
    """Symmetrized k-nearest-neighbor graph with 0/1 weights.

    Neighbors are found under Euclidean distance over the columns of ``x``;
    distance ties are broken toward the lower column index.
    """
    x = as_real_matrix(x, "x")
    n = x.shape[1]
    if k_neighbors < 1 or k_neighbors >= n:
        raise ContractViolation(
            f"k_neighbors must be in [1, n-1], got {k_neighbors} for n={n}"
        )
    colsq = np.sum(x * x, axis=0)
    d2 = colsq[:, None] + colsq[None, :] - 2.0 * (x.T @ x)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    weights = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k_neighbors)
    cols = order[:, :k_neighbors].ravel()
    weights[rows, cols] = 1.0
    weights = np.maximum(weights, weights.T)
    degree = weights.sum(axis=1)
    laplacian = np.diag(degree) - weights
    return NeighborGraph(weights, degree, laplacian)


def gnmf_solve(x, graph: NeighborGraph, lam: float, config: SolverConfig) -> FactorPair:
    """Graph-regularized NMF: the H sweep gains a neighbor-weight numerator
    term and a degree denominator term, weighted by ``lam``."""
    x = as_nonneg_matrix(x, "x")
    if lam < 0:
        raise ContractViolation("lam must be >= 0")
    if graph.weights.shape[0] != x.shape[1]:
        raise ContractViolation(
            f"graph has {graph.weights.shape[0]} nodes, data has {x.shape[1]} columns"
        )
    s = scipy.sparse.csr_matrix(graph.weights)
    indptr = np.ascontiguousarray(s.indptr, dtype=np.int64)
    indices = np.ascontiguousarray(s.indices, dtype=np.int64)
    sdata = np.ascontiguousarray(s.data, dtype=np.float64)
    deg = np.ascontiguousarray(graph.degree, dtype=np.float64)
    pair = init_factors(x.shape[0], x.shape[1], config)
    kern = active_kernels()
    w, h, trace = kern.gnmf_sweeps(
        x, pair.w, pair.h, indptr, indices, sdata, deg, float(lam),
        config.max_iters, config.rel_tol, DEFAULT_EPS,
    )
    return FactorPair(w, h, trace)


def frnmf_solve(x, lam: float, config: SolverConfig) -> FactorPair:
    """Feature-relationship NMF: the W sweep gains a lam*XX^T*W numerator
    term and a (lam^2/2)*WW^T*W denominator term."""
    x = as_nonneg_matrix(x, "x")
    if lam < 0:
        raise ContractViolation("lam must be >= 0")
    if lam == 0.0:
        e = np.zeros((1, 1))  # never read by the kernels
    else:
        e = x @ x.T
    pair = init_factors(x.shape[0], x.shape[1], config)
    kern = active_kernels()
    w, h, trace = kern.frnmf_sweeps(
        x, pair.w, pair.h, e, float(lam),
        config.max_iters, config.rel_tol, DEFAULT_EPS,
    )
    return FactorPair(w, h, trace)
