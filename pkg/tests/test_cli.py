"""End-to-end command-line runs: exit codes, report schema, DOT output."""

import json
from pathlib import Path

from reentscan.cli import EXIT_USAGE, main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_no_targets_is_usage_error(capsys):
    assert main([]) == EXIT_USAGE
    assert "no targets" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["--frobnicate"]) == EXIT_USAGE


def test_missing_file_is_usage_error(capsys):
    assert main(["--bytecode", "/nonexistent.hex"]) == EXIT_USAGE


def test_fund_run_reports_vulnerable(tmp_path, capsys):
    report_path = tmp_path / "out.json"
    cfg_dir = tmp_path / "cfg"
    code = main(["--bytecode", str(FIXTURES / "fund.hex"),
                 "--report", str(report_path),
                 "--cfg-out", str(cfg_dir),
                 "--verbose"])
    assert code == 1

    out = capsys.readouterr().out
    assert "fund" in out and "vulnerable" in out

    report = json.loads(report_path.read_text())
    assert report["status"] == "vulnerable"
    assert set(report) == {"status", "elapsed_ms", "contracts"}
    (contract,) = report["contracts"]
    assert set(contract) >= {"contract", "source", "status", "functions",
                             "pairs"}
    (pair,) = contract["pairs"]
    assert set(pair) >= {"f", "g", "status", "witness-model",
                         "paths_I", "paths_C", "elapsed_ms"}
    assert pair["status"] == "vulnerable"
    assert pair["witness-model"]  # hex-valued assignment
    assert all(v.startswith("0x") for v in pair["witness-model"].values())

    dots = list(cfg_dir.glob("*.dot"))
    assert len(dots) == 1
    assert dots[0].read_text().startswith("digraph")
