"""Benchmark the compiled multiplicative-update kernels against the numpy
fallback on representative problem sizes.

Usage:
    python3 benchmarks/compare_backends.py [--iters 200] [--repeats 5]

The training pipeline spends nearly all of its time inside these sweep
kernels on small class-pair subsets, so the small/medium rows are the ones
that matter for end-to-end runtime.
"""

from __future__ import annotations

import argparse
import time

import numpy as np
import scipy.sparse

from pairnmf import SolverConfig, build_graph, init_factors
from pairnmf._backend import available_backends

CASES = [
    # (label, d, n, rank)
    ("small  (pair subset)", 13, 80, 4),
    ("medium (pair subset)", 40, 140, 6),
    ("large  (whole set)", 64, 700, 10),
]


def _graph_args(x):
    graph = build_graph(x, min(5, x.shape[1] - 1))
    s = scipy.sparse.csr_matrix(graph.weights)
    return (
        np.ascontiguousarray(s.indptr, dtype=np.int64),
        np.ascontiguousarray(s.indices, dtype=np.int64),
        np.ascontiguousarray(s.data, dtype=np.float64),
        np.ascontiguousarray(graph.degree, dtype=np.float64),
    )


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iters", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("only the numpy backend is available; build the extension "
              "(pip install -e . --no-build-isolation) to compare")
    eps, rel_tol = 1e-12, 1e-300  # run every sweep; no early convergence

    header = f"{'case':<22} {'solver':<6} " + " ".join(f"{n:>12}" for n in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, d, n, rank in CASES:
        rng = np.random.default_rng(0)
        x = rng.random((d, n))
        init = init_factors(d, n, SolverConfig(rank=rank, seed=0))
        indptr, indices, sdata, deg = _graph_args(x)
        e = x @ x.T
        solvers = {
            "nmf": lambda k: k.nmf_sweeps(
                x, init.w.copy(), init.h.copy(), args.iters, rel_tol, eps
            ),
            "gnmf": lambda k: k.gnmf_sweeps(
                x, init.w.copy(), init.h.copy(), indptr, indices, sdata, deg,
                0.5, args.iters, rel_tol, eps,
            ),
            "frnmf": lambda k: k.frnmf_sweeps(
                x, init.w.copy(), init.h.copy(), e, 0.3, args.iters, rel_tol, eps
            ),
        }
        for solver_name, run in solvers.items():
            times = {
                name: _time(lambda k=kern: run(k), args.repeats)
                for name, kern in backends.items()
            }
            row = f"{label:<22} {solver_name:<6} " + " ".join(
                f"{times[name] * 1e3:>10.2f}ms" for name in backends
            )
            if len(times) == 2:
                row += f" {times['python'] / times['cython']:>8.2f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
