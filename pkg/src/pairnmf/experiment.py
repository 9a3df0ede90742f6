"""Experiment harness: runs the per-class-pair (cnmf) and whole-dataset
(unmf) strategies across ranks and seeds, records cross-validated
accuracies, meanAcc, per-rank gaps, and GA fitness traces.

Report files are bitwise reproducible for a fixed config: keys are sorted,
and wall time is logged rather than written into the file.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .classify import predict, predict_single
from .data import BlobSpec, load_csv, make_blobs, minmax_scale, select_k_best, train_test_split
from .errors import ContractViolation, DataError
from .ga import GaConfig, optimize
from .linalg import DEFAULT_RIDGE
from .seeds import derive_seed
from .solvers import SolverConfig
from .training import (
    DEFAULT_GRAPH_NEIGHBORS,
    LabeledDataset,
    PairwiseEvaluator,
    UnmfEvaluator,
    fit_final,
    make_folds,
)

logger = logging.getLogger(__name__)

STRATEGIES = ("cnmf", "unmf")
DEFAULT_RANKS = (2, 4, 6, 8, 10)


@dataclass(frozen=True)
class RunConfig:
    dataset: str  # csv path or "blob:cl=3,f=10[,n=1000,std=1.0,seed=0]"
    algo: str = "gnmf"
    strategy: str = "both"  # cnmf | unmf | both
    ranks: tuple = DEFAULT_RANKS
    seeds: tuple = (0, 1, 2, 3, 4)
    folds: int = 5
    label_column: str = "label"
    select_k: Optional[int] = None
    test_fraction: float = 0.3
    max_iters: int = 200
    rel_tol: float = 1e-4
    knn_k: int = 1
    ridge: float = DEFAULT_RIDGE
    graph_k: int = DEFAULT_GRAPH_NEIGHBORS
    ga: GaConfig = field(default_factory=GaConfig)
    eval_test: bool = False

    def __post_init__(self):
        if not self.ranks or any(r < 1 for r in self.ranks):
            raise ContractViolation("ranks must be non-empty with every rank >= 1")
        if not self.seeds:
            raise ContractViolation("at least one seed is required")
        if self.strategy not in ("cnmf", "unmf", "both"):
            raise ContractViolation(f"unknown strategy {self.strategy!r}")

    @property
    def strategies(self) -> tuple:
        return STRATEGIES if self.strategy == "both" else (self.strategy,)


@dataclass
class ExperimentReport:
    per_rank_accuracy: dict  # {strategy: {rank: mean-over-seeds accuracy}}
    per_seed_accuracy: dict  # {strategy: {rank: [accuracy per seed]}}
    mean_acc: dict  # {strategy: mean over ranks}
    gap_per_rank: dict  # {rank: cnmf - unmf}; empty unless both strategies ran
    ga_trace: dict  # {strategy: {rank: {seed: [best-so-far fitness]}}}
    test_accuracy: dict  # {strategy: {rank: [per-seed held-out accuracy]}}
    metadata: dict  # config echo

    def to_dict(self) -> dict:
        return {
            "per_rank_accuracy": {
                s: {str(r): v for r, v in ranks.items()}
                for s, ranks in self.per_rank_accuracy.items()
            },
            "per_seed_accuracy": {
                s: {str(r): v for r, v in ranks.items()}
                for s, ranks in self.per_seed_accuracy.items()
            },
            "mean_acc": dict(self.mean_acc),
            "gap_per_rank": {str(r): v for r, v in self.gap_per_rank.items()},
            "ga_trace": {
                s: {str(r): {str(sd): tr for sd, tr in seeds.items()}
                    for r, seeds in ranks.items()}
                for s, ranks in self.ga_trace.items()
            },
            "test_accuracy": {
                s: {str(r): v for r, v in ranks.items()}
                for s, ranks in self.test_accuracy.items()
            },
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            per_rank_accuracy={
                s: {int(r): v for r, v in ranks.items()}
                for s, ranks in d["per_rank_accuracy"].items()
            },
            per_seed_accuracy={
                s: {int(r): v for r, v in ranks.items()}
                for s, ranks in d["per_seed_accuracy"].items()
            },
            mean_acc=dict(d["mean_acc"]),
            gap_per_rank={int(r): v for r, v in d["gap_per_rank"].items()},
            ga_trace={
                s: {int(r): {int(sd): tr for sd, tr in seeds.items()}
                    for r, seeds in ranks.items()}
                for s, ranks in d["ga_trace"].items()
            },
            test_accuracy={
                s: {int(r): v for r, v in ranks.items()}
                for s, ranks in d["test_accuracy"].items()
            },
            metadata=d["metadata"],
        )


def parse_blob_spec(spec: str) -> BlobSpec:
    """Parse "blob:cl=3,f=10[,n=1000,std=1.0,seed=0,low=1,high=5]"."""
    body = spec[len("blob:"):]
    keys = {"cl": None, "f": None, "n": 1000, "std": 1.0, "seed": 0,
            "low": 1.0, "high": 5.0}
    for item in body.split(","):
        if not item:
            continue
        if "=" not in item:
            raise DataError(f"bad blob parameter {item!r} in {spec!r}")
        key, _, value = item.partition("=")
        if key not in keys:
            raise DataError(f"unknown blob parameter {key!r} in {spec!r}")
        keys[key] = value
    if keys["cl"] is None or keys["f"] is None:
        raise DataError(f"blob spec {spec!r} requires cl= and f=")
    try:
        return BlobSpec(
            n_centers=int(keys["cl"]),
            n_features=int(keys["f"]),
            n_samples=int(keys["n"]),
            cluster_std=float(keys["std"]),
            center_box=(float(keys["low"]), float(keys["high"])),
            seed=int(keys["seed"]),
        )
    except ValueError as exc:
        raise DataError(f"bad blob spec {spec!r}: {exc}") from exc


def load_dataset(config: RunConfig) -> LabeledDataset:
    if config.dataset.startswith("blob:"):
        table = make_blobs(parse_blob_spec(config.dataset))
    else:
        table = load_csv(config.dataset, config.label_column)
    if config.select_k is not None:
        table = select_k_best(table, config.select_k)
    return minmax_scale(table)


def _run_cell(config: RunConfig, data: LabeledDataset, strategy, rank, seed):
    """One (strategy, rank, seed) cell: GA-tuned CV accuracy plus trace."""
    train, test = train_test_split(
        data, config.test_fraction, derive_seed(seed, "split")
    )
    folds = make_folds(train, config.folds, derive_seed(seed, "folds"))
    solver_cfg = SolverConfig(
        rank=rank,
        max_iters=config.max_iters,
        rel_tol=config.rel_tol,
        seed=derive_seed(seed, "init"),
    )
    kwargs = dict(knn_k=config.knn_k, ridge=config.ridge, graph_k=config.graph_k)
    if strategy == "cnmf":
        evaluator = PairwiseEvaluator(train, config.algo, rank, folds, solver_cfg, **kwargs)
    else:
        evaluator = UnmfEvaluator(train, config.algo, rank, folds, solver_cfg, **kwargs)
    ga_cfg = replace(config.ga, seed=derive_seed(seed, "ga"))
    trace = optimize(lambda ch: evaluator.evaluate(ch.genes), evaluator.t_len, ga_cfg)
    best = trace.best_chromosome
    test_acc = None
    if config.eval_test:
        ensemble = fit_final(
            train, best.genes, config.algo, rank, solver_cfg,
            strategy=strategy, graph_k=config.graph_k,
        )
        if strategy == "cnmf":
            preds = [
                predict(test.x[:, j], ensemble.models, config.knn_k, config.ridge)
                for j in range(test.n_samples)
            ]
        else:
            preds = [
                predict_single(test.x[:, j], ensemble.models[0], config.knn_k, config.ridge)
                for j in range(test.n_samples)
            ]
        test_acc = float(np.mean(np.asarray(preds) == test.y))
    return float(best.fitness), list(trace.best_fitness_per_generation), test_acc


def run_experiment(config: RunConfig) -> ExperimentReport:
    """Full sweep over (strategy, rank, seed); deterministic per config.

    If a cell fails, the partial report collected so far is attached to the
    raised exception as ``exc.partial_report`` so callers can flush it.
    """
    data = load_dataset(config)
    per_seed: dict = {s: {r: [] for r in config.ranks} for s in config.strategies}
    traces: dict = {s: {r: {} for r in config.ranks} for s in config.strategies}
    test_accs: dict = {s: {r: [] for r in config.ranks} for s in config.strategies}
    started = time.perf_counter()
    try:
        for strategy in config.strategies:
            for rank in config.ranks:
                for seed in config.seeds:
                    acc, trace, test_acc = _run_cell(config, data, strategy, rank, seed)
                    per_seed[strategy][rank].append(acc)
                    traces[strategy][rank][seed] = trace
                    if test_acc is not None:
                        test_accs[strategy][rank].append(test_acc)
                    logger.info(
                        "%s rank=%d seed=%d: cv_acc=%.4f", strategy, rank, seed, acc
                    )
    except Exception as exc:
        exc.partial_report = _assemble(config, per_seed, traces, test_accs)  # type: ignore[attr-defined]
        raise
    report = _assemble(config, per_seed, traces, test_accs)
    logger.info("experiment finished in %.1fs", time.perf_counter() - started)
    return report


def _assemble(config, per_seed, traces, test_accs) -> ExperimentReport:
    per_rank = {
        s: {r: float(np.mean(v)) for r, v in ranks.items() if v}
        for s, ranks in per_seed.items()
    }
    mean_acc = {
        s: float(np.mean(list(ranks.values()))) for s, ranks in per_rank.items() if ranks
    }
    gap = {}
    if "cnmf" in per_rank and "unmf" in per_rank:
        for r in config.ranks:
            if r in per_rank["cnmf"] and r in per_rank["unmf"]:
                gap[r] = per_rank["cnmf"][r] - per_rank["unmf"][r]
    metadata = {
        "dataset": config.dataset,
        "algo": config.algo,
        "strategy": config.strategy,
        "ranks": list(config.ranks),
        "seeds": list(config.seeds),
        "folds": config.folds,
        "label_column": config.label_column,
        "select_k": config.select_k,
        "test_fraction": config.test_fraction,
        "max_iters": config.max_iters,
        "rel_tol": config.rel_tol,
        "knn_k": config.knn_k,
        "ridge": config.ridge,
        "graph_k": config.graph_k,
        "ga": asdict(config.ga),
        "eval_test": config.eval_test,
    }
    return ExperimentReport(
        per_rank_accuracy=per_rank,
        per_seed_accuracy={s: {r: v for r, v in ranks.items() if v}
                           for s, ranks in per_seed.items()},
        mean_acc=mean_acc,
        gap_per_rank=gap,
        ga_trace=traces,
        test_accuracy={s: {r: v for r, v in ranks.items() if v}
                       for s, ranks in test_accs.items()},
        metadata=metadata,
    )


def aggregate_gap(reports) -> dict:
    """Per-rank mean of cnmf-minus-unmf gaps across several reports."""
    reports = list(reports)
    if not reports:
        raise ContractViolation("aggregate_gap needs at least one report")
    grid = sorted(reports[0].gap_per_rank)
    if not grid:
        raise ContractViolation("reports must contain both strategies")
    for rep in reports[1:]:
        if sorted(rep.gap_per_rank) != grid:
            raise ContractViolation("reports have mismatched rank grids")
    return {
        r: float(np.mean([rep.gap_per_rank[r] for rep in reports])) for r in grid
    }


def emit_report(report: ExperimentReport, path, fmt: str = "json") -> None:
    """Write a report as JSON (full contents) or CSV (table view: one row
    per rank plus a meanAcc row)."""
    path = Path(path)
    if fmt == "json":
        payload = json.dumps(report.to_dict(), sort_keys=True, indent=2)
        path.write_text(payload + "\n", encoding="utf-8")
    elif fmt == "csv":
        strategies = sorted(report.per_rank_accuracy)
        ranks = sorted({r for s in strategies for r in report.per_rank_accuracy[s]})
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            header = ["rank"] + strategies
            if report.gap_per_rank:
                header.append("gap")
            writer.writerow(header)
            for r in ranks:
                row = [r] + [
                    repr(report.per_rank_accuracy[s].get(r, "")) for s in strategies
                ]
                if report.gap_per_rank:
                    row.append(repr(report.gap_per_rank.get(r, "")))
                writer.writerow(row)
            mean_row = ["meanAcc"] + [repr(report.mean_acc[s]) for s in strategies]
            if report.gap_per_rank:
                mean_row.append(
                    repr(report.mean_acc["cnmf"] - report.mean_acc["unmf"])
                )
            writer.writerow(mean_row)
    else:
        raise ContractViolation(f"unknown report format {fmt!r}")


def load_report(path) -> ExperimentReport:
    """Read back a JSON report written by :func:`emit_report`."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"report file not found: {path}")
    return ExperimentReport.from_dict(json.loads(path.read_text(encoding="utf-8")))
