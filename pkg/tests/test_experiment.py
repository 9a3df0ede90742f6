"""Experiment harness, report round-trips, and the command-line interface."""

import json

import numpy as np
import pytest

from pairnmf import (
    ExperimentReport,
    GaConfig,
    RunConfig,
    aggregate_gap,
    emit_report,
    load_report,
    run_experiment,
)
from pairnmf.cli import main
from pairnmf.errors import ContractViolation, DataError
from pairnmf.experiment import parse_blob_spec

FAST_GA = GaConfig(pop_size=4, generations=2, patience=2)
FAST_BLOB = "blob:cl=2,f=5,n=40"


def _fast_config(**overrides):
    base = dict(
        dataset=FAST_BLOB, ranks=(2,), seeds=(0,), folds=2,
        max_iters=30, ga=FAST_GA,
    )
    base.update(overrides)
    return RunConfig(**base)


# ------------------------------------------------------------- blob parsing


def test_parse_blob_spec_defaults_and_overrides():
    spec = parse_blob_spec("blob:cl=3,f=10")
    assert (spec.n_centers, spec.n_features, spec.n_samples) == (3, 10, 1000)
    assert spec.cluster_std == 1.0 and spec.center_box == (1.0, 5.0)
    spec = parse_blob_spec("blob:cl=4,f=8,n=200,std=0.5,seed=7,low=0.0,high=2.0")
    assert spec.n_samples == 200 and spec.cluster_std == 0.5
    assert spec.seed == 7 and spec.center_box == (0.0, 2.0)


def test_parse_blob_spec_errors():
    with pytest.raises(DataError):
        parse_blob_spec("blob:cl=3")  # f missing
    with pytest.raises(DataError):
        parse_blob_spec("blob:cl=3,f=10,bogus=1")
    with pytest.raises(DataError):
        parse_blob_spec("blob:cl=three,f=10")


def test_run_config_validation():
    with pytest.raises(ContractViolation):
        RunConfig(dataset=FAST_BLOB, ranks=())
    with pytest.raises(ContractViolation):
        RunConfig(dataset=FAST_BLOB, seeds=())
    with pytest.raises(ContractViolation):
        RunConfig(dataset=FAST_BLOB, strategy="ovr")
    assert RunConfig(dataset=FAST_BLOB, strategy="cnmf").strategies == ("cnmf",)
    assert RunConfig(dataset=FAST_BLOB).strategies == ("cnmf", "unmf")


# ------------------------------------------------------------- experiments


def test_run_experiment_report_structure():
    report = run_experiment(_fast_config(ranks=(2, 3), seeds=(0, 1)))
    for strategy in ("cnmf", "unmf"):
        assert sorted(report.per_rank_accuracy[strategy]) == [2, 3]
        for r in (2, 3):
            accs = report.per_seed_accuracy[strategy][r]
            assert len(accs) == 2
            assert all(0.0 <= a <= 1.0 for a in accs)
            assert report.per_rank_accuracy[strategy][r] == pytest.approx(np.mean(accs))
        assert report.mean_acc[strategy] == pytest.approx(
            np.mean(list(report.per_rank_accuracy[strategy].values()))
        )
    for r in (2, 3):
        assert report.gap_per_rank[r] == pytest.approx(
            report.per_rank_accuracy["cnmf"][r] - report.per_rank_accuracy["unmf"][r]
        )
        for strategy in ("cnmf", "unmf"):
            trace = report.ga_trace[strategy][r][0]
            assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert report.metadata["dataset"] == FAST_BLOB


def test_run_experiment_single_strategy_has_no_gap():
    report = run_experiment(_fast_config(strategy="unmf"))
    assert report.gap_per_rank == {}
    assert list(report.mean_acc) == ["unmf"]


def test_run_experiment_eval_test_populates_held_out_accuracy():
    report = run_experiment(_fast_config(eval_test=True))
    for strategy in ("cnmf", "unmf"):
        accs = report.test_accuracy[strategy][2]
        assert len(accs) == 1 and 0.0 <= accs[0] <= 1.0


def test_run_experiment_is_deterministic():
    a = run_experiment(_fast_config(ranks=(2, 3)))
    b = run_experiment(_fast_config(ranks=(2, 3)))
    assert a.to_dict() == b.to_dict()


def test_run_experiment_attaches_partial_report_on_failure():
    cfg = _fast_config(dataset="blob:cl=2,f=5,n=12", folds=5)  # classes too small
    with pytest.raises(ContractViolation) as excinfo:
        run_experiment(cfg)
    partial = excinfo.value.partial_report
    assert isinstance(partial, ExperimentReport)


# ----------------------------------------------------------------- reports


def test_report_json_round_trip(tmp_path):
    report = run_experiment(_fast_config())
    path = tmp_path / "report.json"
    emit_report(report, path, "json")
    loaded = load_report(path)
    assert loaded.to_dict() == report.to_dict()
    assert loaded.per_rank_accuracy["cnmf"][2] == report.per_rank_accuracy["cnmf"][2]


def test_report_csv_layout(tmp_path):
    report = run_experiment(_fast_config())
    path = tmp_path / "report.csv"
    emit_report(report, path, "csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "rank,cnmf,unmf,gap"
    first = lines[1].split(",")
    assert first[0] == "2"
    assert float(first[1]) == report.per_rank_accuracy["cnmf"][2]
    assert lines[-1].startswith("meanAcc,")


def test_emit_report_rejects_unknown_format(tmp_path):
    report = run_experiment(_fast_config())
    with pytest.raises(ContractViolation):
        emit_report(report, tmp_path / "r.xml", "xml")


def test_load_report_missing_file():
    with pytest.raises(DataError):
        load_report("/no/such/report.json")


def test_aggregate_gap_means_and_validation():
    def fake(gaps):
        return ExperimentReport({}, {}, {}, gaps, {}, {}, {})

    out = aggregate_gap([fake({2: 0.3, 10: 0.1}), fake({2: 0.1, 10: -0.1})])
    assert out == {2: pytest.approx(0.2), 10: pytest.approx(0.0)}
    with pytest.raises(ContractViolation):
        aggregate_gap([])
    with pytest.raises(ContractViolation):
        aggregate_gap([fake({})])
    with pytest.raises(ContractViolation):
        aggregate_gap([fake({2: 0.1}), fake({4: 0.1})])


# --------------------------------------------------------------------- CLI


def _run_cli(tmp_path, *extra):
    out = tmp_path / "report.json"
    argv = [
        "run", "--dataset", FAST_BLOB, "--ranks", "2", "--seeds", "0",
        "--folds", "2", "--max-iters", "30", "--pop-size", "4",
        "--generations", "2", "--patience", "2", "--out", str(out),
    ] + list(extra)
    return main(argv), out


def test_cli_run_success(tmp_path, capsys):
    code, out = _run_cli(tmp_path)
    assert code == 0
    assert out.exists()
    stdout = capsys.readouterr().out
    assert "meanAcc[cnmf]" in stdout and "meanAcc[unmf]" in stdout


def test_cli_usage_errors_exit_1(capsys):
    assert main(["run"]) == 1  # --dataset missing
    assert main(["bogus-command"]) == 1
    assert main(["run", "--dataset", FAST_BLOB, "--ranks", "two"]) == 1
    assert main(["run", "--dataset", FAST_BLOB, "--strategy", "ovr"]) == 1
    assert "usage error" in capsys.readouterr().err


def test_cli_data_errors_exit_2(tmp_path, capsys):
    assert main(["run", "--dataset", "/no/such.csv", "--out", str(tmp_path / "r.json")]) == 2
    bad_blob = ["run", "--dataset", "blob:cl=2", "--out", str(tmp_path / "r.json")]
    assert main(bad_blob) == 2
    # runtime contract violation from the data (class smaller than fold count)
    code, _ = _run_cli(tmp_path, "--dataset", "blob:cl=2,f=5,n=6", "--folds", "5")
    assert code == 2
    assert "data error" in capsys.readouterr().err


def test_cli_seed_range_syntax(tmp_path):
    code, out = _run_cli(tmp_path, "--seeds", "0..1")
    assert code == 0
    report = load_report(out)
    assert report.metadata["seeds"] == [0, 1]


def test_cli_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "dataset = blob:cl=2,f=5,n=40\n"
        "# comment\n"
        "ranks = 2\nseeds = 0\nfolds = 2\nmax-iters = 30\n"
        "pop-size = 4\ngenerations = 2\npatience = 2\n"
        "rel_tol = 1e-3\n"
    )
    out = tmp_path / "from_cfg.json"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    report = load_report(out)
    assert report.metadata["rel_tol"] == 1e-3
    # explicit flag wins over the file value
    out2 = tmp_path / "override.json"
    assert main(["run", "--config", str(cfg), "--rel-tol", "1e-2", "--out", str(out2)]) == 0
    assert load_report(out2).metadata["rel_tol"] == 1e-2


def test_cli_config_file_errors(tmp_path):
    missing = main(["run", "--config", str(tmp_path / "nope.cfg")])
    assert missing == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("dataset blob:cl=2,f=5\n")
    assert main(["run", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("dataset=blob:cl=2,f=5\nwarp_speed=9\n")
    assert main(["run", "--config", str(unknown)]) == 1


def test_cli_csv_format_inferred_from_suffix(tmp_path):
    out = tmp_path / "report.csv"
    argv = [
        "run", "--dataset", FAST_BLOB, "--ranks", "2", "--seeds", "0",
        "--folds", "2", "--max-iters", "30", "--pop-size", "4",
        "--generations", "2", "--patience", "2", "--out", str(out),
    ]
    assert main(argv) == 0
    assert out.read_text().startswith("rank,cnmf,unmf,gap")


def test_cli_gap_subcommand(tmp_path, capsys):
    _, report_a = _run_cli(tmp_path)
    report_b = tmp_path / "b.json"
    emit_report(load_report(report_a), report_b, "json")
    gap_out = tmp_path / "gap.json"
    code = main(["gap", "--reports", str(report_a), str(report_b), "--out", str(gap_out)])
    assert code == 0
    payload = json.loads(gap_out.read_text())
    assert "2" in payload["mean_gap_per_rank"]
    assert "meanGap[r=2]" in capsys.readouterr().out


def test_cli_rerun_is_bitwise_identical(tmp_path):
    _, first = _run_cli(tmp_path)
    second = tmp_path / "again.json"
    _run_cli(tmp_path, "--out", str(second))
    assert first.read_bytes() == second.read_bytes()
