import csv
import io
import json
import subprocess
import sys

import pytest

from tangenta.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_quadratrix_csv(capsys):
    code, out, _ = run(capsys, "quadratrix", "--curve", "x", "--domain", "0", "1", "--nodes", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "z_lo", "z_hi", "z_mid"]
    assert float(rows[-1][3]) == pytest.approx(0.5)


def test_verify_holds_exits_zero(capsys):
    code, out, _ = run(capsys, "verify", "ftc", "--curve", "x^2", "--domain", "0", "2", "--probes", "5", "--tol", "1e-3")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "holds" and rep["theorem"] == "ftc"


def test_verify_fails_exits_one(capsys):
    # the truncation error h^2/3 = 3.3e-5 exceeds a 1e-6 residual allowance
    code, out, _ = run(capsys, "verify", "ftc", "--curve", "x^2", "--domain", "0", "2", "--probes", "3")
    assert code == 1 and json.loads(out)["verdict"] == "fails"


@pytest.mark.parametrize(
    "theorem,extra",
    [("prop11", []), ("prop19", ["--cells", "20"]), ("leibniz", ["--delta", "0.2"]), ("subnormal", ["--cells", "32"])],
)
def test_each_theorem_runs(capsys, theorem, extra):
    code, out, _ = run(capsys, "verify", theorem, "--curve", "x^2 + 1", "--domain", "0.5", "2", *extra)
    assert code == 0, out
    assert json.loads(out)["verdict"] == "holds"


def test_precondition_error_exits_three(capsys):
    code, _, err = run(capsys, "verify", "prop11", "--curve", "sin(x)", "--domain", "0", "6")
    assert code == 3
    payload = json.loads(err)
    assert payload["error"] == "not-monotone"


def test_parse_error_exits_three_with_offset(capsys):
    code, _, err = run(capsys, "riemann", "--curve", "x +", "--domain", "0", "1")
    assert code == 3
    assert json.loads(err)["offset"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "prop11", "--curve", "x"],
        ["verify", "nonsense"],
        ["riemann", "--curve", "x", "--domain", "0"],
        ["device", "tractrix", "--a", "1", "--from", "0.1"],
        [],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == "usage"


def test_riemann_numbers(capsys):
    code, out, _ = run(capsys, "riemann", "--curve", "x", "--domain", "0", "1", "--cells", "4")
    d = json.loads(out)
    assert (d["lower"], d["upper"], d["oscillation"], d["tagged_sum"]) == (0.375, 0.625, 0.25, 0.375)


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cells": 2, "tag": 1.0}))
    _, out, _ = run(capsys, "riemann", "--curve", "x", "--domain", "0", "1", "--config", str(cfg))
    d = json.loads(out)
    assert d["cells"] == 2 and d["tagged_sum"] == 0.75
    _, out, _ = run(capsys, "riemann", "--curve", "x", "--domain", "0", "1", "--config", str(cfg), "--cells", "4")
    assert json.loads(out)["cells"] == 4


def test_bad_config_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    code, _, _ = run(capsys, "riemann", "--curve", "x", "--domain", "0", "1", "--config", str(cfg))
    assert code == 2


def test_curve_file(capsys, tmp_path):
    f = tmp_path / "curve.json"
    f.write_text(json.dumps({"kind": "sampled", "x": [0, 1, 2], "y": [0, 1, 0]}))
    code, out, _ = run(capsys, "riemann", "--curve-file", str(f), "--cells", "2")
    assert code == 0 and json.loads(out)["upper"] == 2


def test_tractrix_csv(capsys):
    code, out, _ = run(capsys, "device", "tractrix", "--a", "1", "--from", "0.1", "--to", "0.9", "--step", "1e-3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,z,ET,TC,CR,slope"
    assert float(lines[-1].split(",")[0]) == pytest.approx(0.9)


def test_device_cam_and_simulate(capsys):
    code, out, _ = run(capsys, "device", "cam", "--w", "1", "--domain", "0.5", "3", "--U", "10")
    assert code == 0 and json.loads(out)["U"] == 10
    code, out, _ = run(capsys, "device", "simulate", "--w", "1", "--domain", "0.5", "3", "--U", "10", "--step", "0.01")
    last = out.splitlines()[-1].split(",")
    assert float(last[1]) == pytest.approx(-2.5, abs=1e-12)
    code, _, err = run(capsys, "device", "cam", "--w", "5", "--domain", "0.5", "1", "--U", "3")
    assert code == 3 and json.loads(err)["error"] == "infeasible-cam"


def test_device_roundtrip(capsys):
    code, out, _ = run(capsys, "device", "roundtrip", "--curve", "x", "--domain", "0.5", "1.5", "--U", "4")
    assert code == 0 and json.loads(out)["verdict"] == "holds"


def test_render_to_out_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TANGENTA_OUT", str(tmp_path))
    code, out, _ = run(capsys, "render", "leibniz", "--curve", "x", "--domain", "0", "2", "--x0", "1", "--delta", "0.5")
    assert code == 0 and out == ""
    svg = (tmp_path / "figure.svg").read_bytes()
    assert svg.startswith(b"<?xml")
    code, _, _ = run(capsys, "render", "barrow", "--curve", "x", "--domain", "0", "2", "--out", "b.svg")
    assert code == 0 and (tmp_path / "b.svg").exists()


def test_out_path(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("TANGENTA_OUT", raising=False)
    target = tmp_path / "sub" / "q.csv"
    code, out, _ = run(capsys, "quadratrix", "--curve", "x", "--domain", "0", "1", "--out", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("x,")


def test_render_is_byte_identical_across_processes(tmp_path):
    argv = [sys.executable, "-m", "tangenta", "render", "leibniz", "--curve", "exp(x)", "--domain", "0", "1",
            "--orientation", "leibniz"]
    one = subprocess.run(argv, capture_output=True, check=True).stdout
    two = subprocess.run(argv, capture_output=True, check=True).stdout
    assert one == two and one.startswith(b"<?xml")


def test_help_exits_zero():
    res = subprocess.run([sys.executable, "-m", "tangenta", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "quadratrix" in res.stdout
