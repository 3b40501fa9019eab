import json

import pytest

from sepsemi.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main
from sepsemi.reports import VerifyParams, _plain, run_verify_hyper


def test_plain_rounds_and_sorts():
    assert _plain({"b": 1 / 3, "a": (1, 2.0)}) == {"b": 0.3333333333, "a": [1, 2.0]}
    assert _plain(float("inf")) == "inf"


def test_hyper_report_is_deterministic():
    p = VerifyParams(samples=80)
    a = run_verify_hyper(3, params=p)
    b = run_verify_hyper(3, params=p)
    assert a.verdict and a.dumps() == b.dumps()
    assert "runtime" not in a.dumps()


def test_cli_classify(capsys):
    assert main(["classify", "1,0,0,0,0,1,0,0,0,0,-1,0,0,0,0,-1"]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["kind"] == "hyperboloid"
    assert main(["classify", "1,0,0"]) == EXIT_INPUT
    assert main(["classify", "1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1"]) == EXIT_INPUT


@pytest.mark.parametrize("argv", [["model", "ellipsoid", "5", "5"], ["model", "cone", "3", "2", "--epsilon", "0"],
                                  ["model", "torus", "1", "1"], ["hyper", "verify", "0"],
                                  ["analyze", "/nonexistent.json"]])
def test_cli_input_errors(argv):
    assert main(argv) == EXIT_INPUT


def test_cli_model_analyze_realize_plot(tmp_path):
    curve = tmp_path / "c.json"
    assert main(["model", "hyperboloid", "1", "0", "--out", str(curve)]) == EXIT_PASS
    d = json.loads(curve.read_text())
    assert d["topology"]["r"] == 1
    out = tmp_path / "a.json"
    assert main(["analyze", str(curve), "--out", str(out)]) == EXIT_PASS
    assert json.loads(out.read_text())["smoothness"]["ok"]
    out = tmp_path / "r.json"
    assert main(["realize", str(curve), "--target", "3", "--samples", "60", "--out", str(out)]) == EXIT_PASS
    assert json.loads(out.read_text())["certified"]
    assert main(["realize", str(curve), "--target", "1,1", "--out", str(out)]) == EXIT_INPUT
    svg = tmp_path / "p.svg"
    assert main(["plot", str(curve), "--target", "3", "--samples", "60", "--section", "1,0.2,0,0.1",
                 "--aux", "0,1,0,0.3", "--out", str(svg)]) == EXIT_PASS
    text = svg.read_text()
    assert text.startswith("<svg") and "c1" in text and "stroke-dasharray" in text


def test_cli_realize_failure_exit_code(tmp_path):
    curve = tmp_path / "e.json"
    assert main(["model", "ellipsoid", "3", "3", "--out", str(curve)]) == EXIT_PASS
    assert main(["realize", str(curve), "--target", "1,1,1", "--samples", "40",
                 "--out", str(tmp_path / "r.json")]) == EXIT_FAIL


def test_cli_hyper(tmp_path, capsys):
    assert main(["hyper", "realize", "4", "--samples", "60"]) == EXIT_PASS
    d = json.loads(capsys.readouterr().out)
    assert d["alternating"]["certificate"]["degree_vector"] == [5]
    out = tmp_path / "h.json"
    assert main(["hyper", "verify", "2", "--samples", "60", "--out", str(out)]) == EXIT_PASS
    assert json.loads(out.read_text())["verdict"] == "pass"
