import csv
import os

import pytest

from riskwarn import cli
from riskwarn.scenario_files import parse_scenario
from riskwarn.scenarios import validate


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "occ"
    code = cli.main(["run", "intersection_occlusion", "--out", str(out),
                     "--plots", "--riskmaps"])
    assert code == 0
    for name in ("trace.csv", "summary.txt", "warning_signal.svg",
                 "velocity_accel.svg"):
        assert (out / name).exists(), name
    # one perceived and one objective grid per sampled second
    maps = sorted(p.name for p in out.glob("riskmap_*.csv"))
    assert "riskmap_0_perceived.csv" in maps
    assert "riskmap_0_objective.csv" in maps
    assert len(maps) % 2 == 0 and len(maps) >= 2
    stdout = capsys.readouterr().out
    assert "first_novel_warning_s: 0" in stdout
    assert "collision_with: car_cross" in stdout


def test_run_trace_schema(tmp_path):
    out = tmp_path / "occ"
    assert cli.main(["run", "intersection_occlusion", "--out", str(out)]) == 0
    with open(out / "trace.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "t", "ego_v", "ego_a", "ego_x", "ego_y",
        "car_cross_v", "car_cross_v_per", "car_cross_aware",
        "R_per", "R_obj", "W_baseline", "novel_active", "baseline_active",
    ]
    assert all(len(r) == len(rows[0]) for r in rows[1:])
    # the overlooked car reads not-aware from the start
    assert rows[1][7] == "0"
    assert float(rows[1][5]) == float(rows[1][6])


def test_run_threshold_overrides_silence_warnings(tmp_path):
    out = tmp_path / "quiet"
    code = cli.main(["run", "intersection_occlusion", "--out", str(out),
                     "--w-thr", "1e6", "--w-thr-baseline", "1e6"])
    assert code == 0
    summary = (out / "summary.txt").read_text()
    assert "first_novel_warning_s: none" in summary
    assert "first_baseline_warning_s: none" in summary


def test_run_rejects_unknown_scenario(tmp_path, capsys):
    code = cli.main(["run", "no_such_scenario", "--out", str(tmp_path)])
    assert code == 1
    assert "builtins:" in capsys.readouterr().err


def test_run_rejects_invalid_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: broken\nduration: 5.0\ndt: 0.1\npaths: []\n"
                   "ego: {id: ego, path: ghost, arc: 0.0, speed: 1.0}\n")
    code = cli.main(["run", str(bad), "--out", str(tmp_path / "out")])
    assert code == 1
    assert "ghost" in capsys.readouterr().err


def test_validate_command_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", "lane_change_no_error"]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: broken\nduration: 5.0\ndt: 0.1\npaths:\n"
                   "- id: lane\n  points:\n  - [0.0, 0.0]\n  - [50.0, 0.0]\n"
                   "ego: {id: ego, path: lane, arc: 500.0, speed: 1.0}\n")
    assert cli.main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "violation" in out


def test_export_scenario_round_trips(capsys):
    assert cli.main(["export-scenario", "lane_change_forecast"]) == 0
    text = capsys.readouterr().out
    spec = parse_scenario(text)
    assert spec.name == "lane_change_forecast"
    assert validate(spec) == []


def test_export_scenario_unknown_name(capsys):
    assert cli.main(["export-scenario", "nope"]) == 1
    assert "unknown builtin" in capsys.readouterr().err


def test_calibrate_command_reports_derivation(capsys):
    assert cli.main(["calibrate"]) == 0
    out = capsys.readouterr().out
    assert "channel ceilings" in out
    assert "chosen thresholds" in out
    assert "would false-positive on: lane_change_no_error" in out
    assert "false positives at chosen thresholds: none" in out


def test_compare_all_rows_and_files(tmp_path, capsys):
    out = tmp_path / "cmp"
    code = cli.main(["compare-all", "--out", str(out)])
    assert code == 0
    with open(out / "comparison.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["scenario", "t_novel", "t_baseline", "lead", "collision"]
    assert len(rows) == 7
    by_name = {r[0]: r for r in rows[1:]}
    # the clean run leaves every numeric cell empty
    assert by_name["lane_change_no_error"][1:] == ["", "", "", ""]
    # each scenario kept its own artifact directory
    for name in by_name:
        assert (out / name / "trace.csv").exists()
        assert (out / name / "summary.txt").exists()
    table = capsys.readouterr().out
    assert "lane_change_notice" in table


def test_seed_field_is_reserved():
    config = cli.RunConfig(scenario="lane_change_no_error", seed=7)
    assert config.seed == 7
