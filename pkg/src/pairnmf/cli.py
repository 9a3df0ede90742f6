"""Command-line entry point.

    pairnmf run --dataset blob:cl=3,f=10 --algo gnmf --strategy both \
        --ranks 2,4,6,8,10 --seeds 0..4 --folds 5 --out report.json
    pairnmf gap --reports a.json b.json --out gap.json

A config file (`--config`, one key=value per line, same names as the long
flags without dashes) provides defaults; explicit flags override it.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ContractViolation, DataError, SingularMatrixError
from .experiment import (
    DEFAULT_RANKS,
    ExperimentReport,
    RunConfig,
    aggregate_gap,
    emit_report,
    load_report,
    run_experiment,
)
from .ga import GaConfig
from .linalg import DEFAULT_RIDGE

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def _parse_int_list(text: str) -> tuple:
    """Accept "2,4,6" or a range "0..4" (inclusive)."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(part) for part in text.split(",") if part)


_RUN_FIELDS = {
    # name -> (converter, default)
    "dataset": (str, None),
    "algo": (str, "gnmf"),
    "strategy": (str, "both"),
    "ranks": (_parse_int_list, DEFAULT_RANKS),
    "seeds": (_parse_int_list, (0, 1, 2, 3, 4)),
    "folds": (int, 5),
    "label_column": (str, "label"),
    "select_k": (int, None),
    "test_fraction": (float, 0.3),
    "max_iters": (int, 200),
    "rel_tol": (float, 1e-4),
    "knn_k": (int, 1),
    "ridge": (float, DEFAULT_RIDGE),
    "graph_k": (int, 5),
    "pop_size": (int, 10),
    "generations": (int, 20),
    "crossover_prob": (float, 0.2),
    "mutation_prob": (float, 0.05),
    "mutation_sigma": (float, 0.1),
    "tournament_size": (int, 3),
    "patience": (int, 5),
    "eval_test": (lambda s: str(s).lower() in ("1", "true", "yes"), False),
    "out": (str, "report.json"),
    "format": (str, None),  # json | csv; default inferred from --out suffix
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="pairnmf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep")
    run.add_argument("--config", help="key=value defaults file")
    run.add_argument("--verbose", action="store_true")
    for name in _RUN_FIELDS:
        flag = "--" + name.replace("_", "-")
        if name == "eval_test":
            run.add_argument(flag, action="store_const", const=True, default=None)
        else:
            run.add_argument(flag, default=None)

    gap = sub.add_parser("gap", help="average per-rank gaps across reports")
    gap.add_argument("--reports", nargs="+", required=True)
    gap.add_argument("--out", required=True)
    return parser


def _read_config_file(path: str) -> dict:
    cfg_path = Path(path)
    if not cfg_path.exists():
        raise UsageError(f"config file not found: {path}")
    values = {}
    for line_num, line in enumerate(cfg_path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_num}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _RUN_FIELDS:
            raise UsageError(f"{path}:{line_num}: unknown option {key!r}")
        values[key] = value.strip()
    return values


def _merge_run_config(args) -> tuple:
    file_values = _read_config_file(args.config) if args.config else {}
    merged = {}
    for name, (convert, default) in _RUN_FIELDS.items():
        cli_value = getattr(args, name)
        if cli_value is not None:
            raw = cli_value
        elif name in file_values:
            raw = file_values[name]
        else:
            merged[name] = default
            continue
        try:
            merged[name] = raw if not isinstance(raw, str) else convert(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for --{name.replace('_', '-')}: {exc}")
    if merged["dataset"] is None:
        raise UsageError("--dataset is required")
    fmt = merged.pop("format")
    out = merged.pop("out")
    if fmt is None:
        fmt = "csv" if str(out).endswith(".csv") else "json"
    if fmt not in ("json", "csv"):
        raise UsageError(f"unknown format {fmt!r}")
    ga = GaConfig(
        pop_size=merged.pop("pop_size"),
        generations=merged.pop("generations"),
        crossover_prob=merged.pop("crossover_prob"),
        mutation_prob=merged.pop("mutation_prob"),
        mutation_sigma=merged.pop("mutation_sigma"),
        tournament_size=merged.pop("tournament_size"),
        patience=merged.pop("patience"),
    )
    try:
        config = RunConfig(ga=ga, **merged)
    except ContractViolation as exc:
        raise UsageError(str(exc))
    return config, out, fmt


def _cmd_run(args) -> int:
    config, out, fmt = _merge_run_config(args)
    try:
        report = run_experiment(config)
    except Exception as exc:
        partial = getattr(exc, "partial_report", None)
        if partial is not None and out:
            try:
                emit_report(partial, out, "json")
                logger.error("aborted; partial results flushed to %s", out)
            except OSError:
                pass
        raise
    emit_report(report, out, fmt)
    for strategy, value in sorted(report.mean_acc.items()):
        print(f"meanAcc[{strategy}] = {value:.4f}")
    print(f"report written to {out}")
    return 0


def _cmd_gap(args) -> int:
    reports = [load_report(p) for p in args.reports]
    gaps = aggregate_gap(reports)
    payload = json.dumps(
        {"mean_gap_per_rank": {str(r): v for r, v in sorted(gaps.items())}},
        sort_keys=True,
        indent=2,
    )
    Path(args.out).write_text(payload + "\n", encoding="utf-8")
    for rank, value in sorted(gaps.items()):
        print(f"meanGap[r={rank}] = {value:+.4f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_gap(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ContractViolation, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (SingularMatrixError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
