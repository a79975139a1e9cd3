import json

import pytest

from znthomae.cli import load_config, main, parse_config, run
from znthomae.errors import ConfigInvalid
from znthomae.report import RunReport, emit_report
from znthomae.suites import SUITE_NAMES


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


BASE = {"N": 3, "m": 1, "branch_points": ["0", "0.5", "1"]}


def test_empty_suites_exit_zero(tmp_path, capsys):
    assert main(["run", write(tmp_path, {**BASE, "suites": []})]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["suites"] == {}


def test_hutchinson_suite(tmp_path, capsys):
    assert main(["run", write(tmp_path, {**BASE, "suites": ["hutchinson"]})]) == 0
    out = json.loads(capsys.readouterr().out)
    pi_check = next(c for c in out["suites"]["hutchinson"]["checks"] if c["name"] == "hutchinson_pi")
    assert pi_check["residual"] <= 1e-6


def test_non_increasing_reports_index():
    with pytest.raises(ConfigInvalid, match="index 2"):
        parse_config({"N": 3, "m": 1, "branch_points": ["0", "1", "0.5"]})


@pytest.mark.parametrize("data", [
    {"N": 3, "m": 1, "branch_points": ["0", "x", "1"]},
    {"N": 3, "m": 1, "branch_points": [0, 1]},
    {"N": 3, "m": 1, "branch_points": [0, 1, 2], "suites": ["nope"]},
    {"N": 1, "m": 1, "branch_points": [0, 1, 2]},
    {"m": 1, "branch_points": [0, 1, 2]},
])
def test_config_errors_exit_two(tmp_path, data):
    assert main(["run", write(tmp_path, data)]) == 2


def test_missing_or_malformed_file(tmp_path):
    assert main(["run", str(tmp_path / "none.json")]) == 2
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert main(["run", str(p)]) == 2


def test_decimal_strings_round_once():
    cfg = parse_config({"N": 2, "m": 1, "branch_points": ["0.1", "0.7", "1.3"]})
    assert cfg.branch_points == (0.1, 0.7, 1.3)


def test_nested_curve_form():
    cfg = parse_config({"curve": {"N": 2, "m": 1, "branch_points": [0, 1, 2]}, "seed": 4})
    assert cfg.seed == 4 and cfg.suites == sorted(SUITE_NAMES)


def test_tolerance_failure_exit_one(tmp_path):
    data = {**BASE, "suites": ["periods"], "tolerances": {"pi_symmetry": -1.0}}
    assert main(["run", write(tmp_path, data), "--format", "text"]) == 1


def test_report_deterministic_and_round_trips(tmp_path):
    cfg = load_config(write(tmp_path, {**BASE, "suites": ["periods", "thomae"]}))
    rep = run(cfg)
    a, b = emit_report(rep, "json"), emit_report(rep, "json")
    assert a == b
    data = json.loads(a)
    assert list(data) == sorted(data)
    assert data["suites"]["thomae"]["max_residual"] == rep.suites[1].max_residual


def test_reproducible_across_runs(tmp_path):
    cfg = load_config(write(tmp_path, {**BASE, "suites": ["theta-identities"], "seed": 3}))
    r1 = json.loads(emit_report(run(cfg)))
    r2 = json.loads(emit_report(run(cfg)))
    c1 = [c["residual"] for c in r1["suites"]["theta-identities"]["checks"]]
    c2 = [c["residual"] for c in r2["suites"]["theta-identities"]["checks"]]
    assert c1 == c2
    assert r1["suites"]["theta-identities"]["draws"] == r2["suites"]["theta-identities"]["draws"]


def test_text_format_one_line_per_suite(tmp_path, capsys):
    main(["run", write(tmp_path, {**BASE, "suites": ["periods", "hutchinson"]}), "--format", "text"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert [ln.split()[0] for ln in lines] == ["hutchinson", "periods"]
    assert all(ln.split()[1] == "pass" for ln in lines)


def test_complex_and_float_encoding():
    rep = RunReport({"z": 1 + 2j, "x": 0.1}, [], 0, environment={"k": 1})
    text = emit_report(rep).decode()
    assert '"z":{"im":2.0,"re":1.0}' in text
    assert '"x":0.10000000000000001' in text


def test_out_file_and_plots(tmp_path):
    out = tmp_path / "r.json"
    plots = tmp_path / "plots"
    code = main(["run", write(tmp_path, {**BASE, "suites": ["periods"]}), "--out", str(out),
                 "--plots", str(plots), "--seed", "5"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["seed"] == 5 and len(data["plots"]) == 2
    assert (plots / "residuals.png").stat().st_size > 0


def test_suite_flag_overrides_config(tmp_path, capsys):
    main(["run", write(tmp_path, {**BASE, "suites": ["thomae"]}), "--suite", "periods"])
    assert list(json.loads(capsys.readouterr().out)["suites"]) == ["periods"]


def test_example_command(capsys):
    assert main(["example", "hutchinson", "--t", "0.3"]) == 0
    assert "max relative error" in capsys.readouterr().out
    assert main(["example", "hutchinson", "--t", "0.99"]) == 2
