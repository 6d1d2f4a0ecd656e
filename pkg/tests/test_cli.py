from __future__ import annotations

import json

from fairride.cli import main
from fairride.events import read_log
from fairride.simulation import SimConfig, run_simulation


def test_simulate_writes_report_and_log(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--seed", "5", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 5
    assert (out / "events.log").exists()
    records = list(read_log(out / "events.log"))
    assert records[0].kind == "config_change"
    printed = capsys.readouterr().out
    assert "offers issued" in printed


def test_simulate_reads_config_file(tmp_path):
    config = {
        "match": {"incentive_threshold": 0.5, "min_offer_window_s": 90.0},
        "sim": {"seed": 9, "n_drivers": 2, "requests_per_hour": 10.0, "duration_hours": 0.5},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(path), "--out", str(out)]) == 0
    records = list(read_log(out / "events.log"))
    bootstrap = records[0].payload
    assert bootstrap["config"]["match"]["incentive_threshold"] == 0.5


def test_simulate_rejects_window_floor_violation(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"match": {"min_offer_window_s": 45.0}}))
    code = main(["simulate", "--config", str(path), "--out", str(tmp_path / "run")])
    assert code == 2
    assert "config rejected" in capsys.readouterr().err


def test_replay_scenarios_writes_six_transcripts(tmp_path):
    out = tmp_path / "scenarios"
    assert main(["replay-scenarios", "--out", str(out)]) == 0
    files = sorted(p.name for p in out.glob("scenario-*.json"))
    assert files == [f"scenario-{i}.json" for i in range(1, 7)]
    combined = json.loads((out / "scenarios.json").read_text())
    assert len(combined) == 6


def test_export_log_verifies_checksums(tmp_path, capsys):
    out = tmp_path / "run"
    run_simulation(SimConfig(seed=2, n_drivers=2, duration_hours=0.5), out_dir=out)
    export = tmp_path / "export.log"
    assert main(["export-log", "--log", str(out / "events.log"), "--out", str(export)]) == 0
    assert "verified and exported" in capsys.readouterr().out

    corrupted = out / "events.log"
    corrupted.write_text(corrupted.read_text()[:-30])
    assert main(["export-log", "--log", str(corrupted), "--out", str(export)]) == 3


def test_export_log_missing_file(tmp_path):
    assert main(["export-log", "--log", str(tmp_path / "nope.log"), "--out", str(tmp_path / "o")]) == 2
