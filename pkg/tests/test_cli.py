import json

import numpy as np
import pytest

from slsid.cli import main


def run(args):
    return main(args)


def test_simulate_example_fixture(tmp_path, capsys):
    assert run(["simulate", "--example", "1", "--output", str(tmp_path)]) == 0
    lines = (tmp_path / "example1.csv").read_text().splitlines()
    assert lines[0] == "x1,x2,y,zeta"
    assert len(lines) == 5
    model = json.loads((tmp_path / "example1_model.json").read_text())
    assert model["S"] == 2 and model["params"][0] == [1.0, 1.0]


def test_simulate_random_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert (
            run(
                [
                    "simulate",
                    "--n", "2", "--S", "2", "--N", "50",
                    "--sigma", "0.1", "--seed", "7",
                    "--output", str(tmp_path / sub),
                ]
            )
            == 0
        )
    name = "scenario_n2_S2_N50_seed7.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_fit_pipeline(tmp_path, capsys):
    run(["simulate", "--example", "2", "--output", str(tmp_path)])
    code = run(
        [
            "fit",
            "--data", str(tmp_path / "example2.csv"),
            "--S", "2", "--seed", "1", "--trace",
            "--output", str(tmp_path),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "fit.json").read_text())
    assert report["objective"] < 1e-12
    assert sorted(set(report["labels"])) == [1, 2]
    trace_lines = (tmp_path / "fit_trace.csv").read_text().splitlines()
    assert trace_lines[0].startswith("iteration,theta1_1")
    assert len(trace_lines) >= 2


def test_oracle_command(tmp_path):
    run(["simulate", "--example", "1", "--output", str(tmp_path)])
    code = run(
        ["oracle", "--data", str(tmp_path / "example1.csv"), "--S", "2",
         "--output", str(tmp_path)]
    )
    assert code == 0
    payload = json.loads((tmp_path / "oracle.json").read_text())
    assert payload["unique"] is False
    assert payload["optimum"] <= 1e-12
    assert len(payload["classes"]) >= 2


def test_oracle_enumeration_limit_exit_code(tmp_path):
    run(
        ["simulate", "--n", "2", "--S", "2", "--N", "40", "--seed", "3",
         "--output", str(tmp_path)]
    )
    code = run(
        ["oracle", "--data", str(tmp_path / "scenario_n2_S2_N40_seed3.csv"),
         "--S", "2", "--limit", "100"]
    )
    assert code == 3


def test_pe_check_command(tmp_path):
    run(["simulate", "--example", "1", "--output", str(tmp_path)])
    code = run(
        [
            "pe-check",
            "--data", str(tmp_path / "example1.csv"),
            "--model", str(tmp_path / "example1_model.json"),
            "--output", str(tmp_path),
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "pe_report.json").read_text())
    assert payload["certified"] is False
    assert payload["cond3_status"] == "refuted"
    assert payload["cond1_distinct_params"] is True


def test_min_samples_single_and_table(tmp_path, capsys):
    assert run(["min-samples", "--n", "3", "--S", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert (payload["ours"], payload["bako"], payload["vidal"]) == (8, 12, 9)
    assert run(["min-samples", "--n", "10", "--S", "7", "--table",
                "--output", str(tmp_path)]) == 0
    lines = (tmp_path / "min_samples.csv").read_text().splitlines()
    assert lines[0] == "n,S,ours,bako,vidal"
    assert len(lines) == 71
    assert lines[-1] == "10,7,259,490,19447"


def test_select_order_command(tmp_path):
    run(["simulate", "--example", "2", "--output", str(tmp_path)])
    code = run(
        [
            "select-order",
            "--data", str(tmp_path / "example2.csv"),
            "--s-bar", "4", "--penalty", "0.2599", "--seed", "1",
            "--output", str(tmp_path),
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "order.json").read_text())
    assert payload["chosen_S"] == 2
    assert len(payload["candidates"]) == 4


def test_consistency_sweep_command(tmp_path):
    code = run(
        [
            "consistency-sweep",
            "--n", "2", "--S", "2", "--sigma", "0", "--N", "30", "60",
            "--trials", "2", "--s-bar", "3", "--restarts", "4",
            "--seed", "5", "--output", str(tmp_path),
        ]
    )
    assert code == 0
    lines = (tmp_path / "consistency.csv").read_text().splitlines()
    assert lines[0] == "N,trials,recovery_rate"
    assert len(lines) == 3


def test_bench_command(tmp_path):
    code = run(
        [
            "bench", "--cell", "2,2,60", "--repetitions", "3",
            "--restarts", "4", "--seed", "1", "--output", str(tmp_path),
        ]
    )
    assert code == 0
    summary = (tmp_path / "bench_summary.csv").read_text().splitlines()
    raw = (tmp_path / "bench_raw.csv").read_text().splitlines()
    assert summary[0].startswith("n,N,S,time_mean")
    assert len(summary) == 2
    assert len(raw) == 4


def test_bench_deterministic_apart_from_timing(tmp_path):
    outs = []
    for sub in ("x", "y"):
        run(
            ["bench", "--cell", "2,2,60", "--repetitions", "2",
             "--restarts", "3", "--seed", "9", "--output", str(tmp_path / sub)]
        )
        rows = (tmp_path / sub / "bench_raw.csv").read_text().splitlines()
        header = rows[0].split(",")
        keep = [i for i, c in enumerate(header) if c != "time"]
        outs.append([",".join(np.array(r.split(","))[keep]) for r in rows])
    assert outs[0] == outs[1]


def test_repro_commands(capsys):
    for table_id in ("table1", "example2-fit", "example2-seven", "example1-oracle"):
        assert run(["repro", table_id]) == 0, table_id
        assert "ok" in capsys.readouterr().out


def test_repro_mismatch_exit_code(monkeypatch, capsys):
    from slsid import bench

    monkeypatch.setattr(bench, "repro", lambda table_id: ["cell (1,1): got 2, expected 1"])
    assert run(["repro", "table1"]) == 2
    assert "MISMATCH" in capsys.readouterr().out


def test_pe_check_undecided_exit_code(tmp_path):
    # a single cluster above the enumeration guard yields an undecided
    # verdict, reported with exit code 3
    run(["simulate", "--n", "2", "--S", "1", "--N", "20", "--seed", "2",
         "--output", str(tmp_path)])
    stem = "scenario_n2_S1_N20_seed2"
    code = run(
        ["pe-check", "--data", str(tmp_path / f"{stem}.csv"),
         "--model", str(tmp_path / f"{stem}_model.json"),
         "--output", str(tmp_path)]
    )
    assert code == 3
    payload = json.loads((tmp_path / "pe_report.json").read_text())
    assert payload["cond3_status"] == "undecided"


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        run(["fit", "--S", "2"])  # missing --data
    assert exc.value.code == 1


def test_unknown_subcommand_exit_code():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 1


def test_missing_file_is_usage_error(tmp_path):
    assert run(["fit", "--data", str(tmp_path / "nope.csv"), "--S", "2"]) == 1


def test_config_file_defaults_with_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "S": 2}))
    assert run(["--config", str(cfg), "min-samples"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert (payload["ours"], payload["bako"], payload["vidal"]) == (8, 12, 9)
    # an explicit flag overrides the config value
    assert run(["--config", str(cfg), "min-samples", "--n", "10"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ours"] == 29


def test_malformed_config_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert run(["--config", str(cfg), "min-samples", "--n", "1", "--S", "1"]) == 1
