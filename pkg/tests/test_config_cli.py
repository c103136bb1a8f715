import json
import subprocess
import sys

import pytest

from martproj.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_IO, EXIT_PASS, main
from martproj.config import (COMMANDS, DEFAULT_SAMPLES, DEFAULT_Z, ConfigError, parse_config,
                             validate_config)
from martproj.experiments import CSV_COLUMNS, SCHEMA_VERSION, run_experiment

MART = {"family": "uniform", "a": 0.5, "b": 1.5}


def test_minimal_config_defaults():
    cfg = parse_config(json.dumps({"command": "classify", "law": MART}))
    assert cfg.samples == DEFAULT_SAMPLES == 50_000
    assert cfg.z == DEFAULT_Z == 3.0
    assert cfg.seed == 0 and cfg.params["prefix"] == [1.0]


def test_inverted_bounds_error():
    with pytest.raises(ConfigError, match="bounds inverted"):
        parse_config(json.dumps({"command": "classify",
                                 "law": {"family": "uniform", "a": 0.8, "b": 0.2}}))


def test_unknown_key_named():
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps({"command": "classify", "law": MART, "gamma_mode": 1}))
    assert any("gamma_mode" in m for m in exc.value.errors)


def test_all_violations_listed():
    bad = {"command": "trajectory", "law": MART, "weights": [0.5, -0.1], "samples": 1,
           "seed": -3}
    with pytest.raises(ConfigError) as exc:
        validate_config(bad)
    assert len(exc.value.errors) == 3


def test_malformed_json():
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_config("{not json")


def test_command_mismatch():
    with pytest.raises(ConfigError, match="requested"):
        validate_config({"command": "classify", "law": MART}, "inform")


def test_trajectory_defaults():
    cfg = validate_config({"law": MART}, "trajectory")
    assert cfg.params["Q"] == 4 and cfg.params["weights"] == [0.25] * 4
    assert cfg.params["grid"] == {"t0": 0.0, "tM": 10.0, "M": 10}


def test_trajectory_report_has_ten_passing_steps():
    cfg = validate_config({"law": MART, "clause": "martingale", "samples": 20_000}, "trajectory")
    rep = run_experiment(cfg)
    steps = rep.to_dict()["results"]["trajectory"]["steps"]
    assert rep.passed and len(steps) == 10 and all(s["pass"] for s in steps)


def test_report_schema():
    rep = run_experiment(validate_config({"law": MART, "samples": 1000}, "classify"))
    d = json.loads(rep.to_json())
    assert d["schema_version"] == SCHEMA_VERSION
    assert set(d) == {"schema_version", "version", "command", "seed", "config", "results", "pass"}
    assert d["config"]["law"] == MART


def _write(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return str(p)


def test_cli_commute_reports_noncommutation(tmp_path, capsys):
    cfg = _write(tmp_path, {"first": {"kind": "horizontal_stretch", "alpha": 1.0},
                            "second": {"kind": "vertical_bump",
                                       "epsilon": {"family": "degenerate", "c": 1.0}},
                            "expect": "noncommute"})
    out = tmp_path / "out"
    assert main(["commute", "--config", cfg, "--out", str(out)]) == EXIT_PASS
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["commutator"]["equal"] is False
    assert rep["results"]["commutator"]["first_diff_time"] == 2.0
    assert (out / "commute.csv").read_text().startswith("time,left,right\n")
    assert (out / "timing.json").exists()


def test_cli_flags_override_config(tmp_path, capsys):
    cfg = _write(tmp_path, {"law": MART, "seed": 1, "samples": 100})
    assert main(["classify", "--config", cfg, "--seed", "7", "--samples", "500", "--z", "2"]) \
        == EXIT_PASS
    rep = json.loads(capsys.readouterr().out)
    assert rep["seed"] == 7 and rep["config"]["samples"] == 500 and rep["config"]["z"] == 2.0


def test_cli_failed_certification_exit(tmp_path, capsys):
    cfg = _write(tmp_path, {"law": MART, "samples": 20_000, "expect": "Supermartingale"})
    assert main(["classify", "--config", cfg]) == EXIT_FAIL


def test_cli_config_error_is_json(tmp_path, capsys):
    cfg = _write(tmp_path, {"law": MART, "gamma_mode": True})
    assert main(["classify", "--config", cfg]) == EXIT_CONFIG
    err = json.loads(capsys.readouterr().out)
    assert err["error"] == "config" and "gamma_mode" in err["messages"][0]


def test_cli_precondition_error(tmp_path, capsys):
    cfg = _write(tmp_path, {"law": {"family": "uniform", "a": 0.2, "b": 0.8},
                            "weights": [0.5, 0.5]})
    assert main(["inform", "--config", cfg]) == EXIT_CONFIG
    assert json.loads(capsys.readouterr().out)["error"] == "precondition"


def test_cli_missing_config_file(tmp_path, capsys):
    assert main(["classify", "--config", str(tmp_path / "missing.json")]) == EXIT_IO


def test_cli_unwritable_out(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = _write(tmp_path, {"law": MART, "samples": 100})
    assert main(["classify", "--config", cfg, "--out", str(blocker / "sub")]) == EXIT_IO


def test_help_documents_csv_columns():
    res = subprocess.run([sys.executable, "-m", "martproj", "--help"], capture_output=True,
                         text=True, check=True)
    for cmd in COMMANDS:
        assert cmd in res.stdout
    assert CSV_COLUMNS["trajectory"].split(":")[0] in res.stdout
    sub = subprocess.run([sys.executable, "-m", "martproj", "trajectory", "--help"],
                         capture_output=True, text=True, check=True)
    assert "--seed" in sub.stdout and "magnitudes.csv" in sub.stdout
