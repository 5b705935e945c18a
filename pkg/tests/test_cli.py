import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qcinterp.cli import main
from qcinterp.thermo import molar_zpe_from_wavenumber


def write_config(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps({"schema_version": 1, **cfg}))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    lines = [ln for ln in captured.err.splitlines() if ln.strip()]
    assert len(lines) == 1, captured.err
    report = json.loads(lines[0])
    assert report["exit_code"] == code
    return code, report, captured.out


def read_table(path):
    text = open(path).read()
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return meta, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_spectrum_box(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"potential": {"kind": "box", "L": 1}, "lambdas": [0, 0.5, 1]})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "spectrum", "--config", cfg, "--out", str(out))
    assert code == 0
    assert report["outputs"] == [str(out)]
    meta, rows = read_table(out)
    assert meta[0] == "# command: spectrum"
    assert len(rows) == 15
    for r in rows:
        if r["lambda"] == "1":
            assert float(r["E_grid"]) == 0.0 and float(r["E_analytic"]) == 0.0


def test_spectrum_harmonic(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "potential": {"kind": "harmonic", "omega": 1}, "lambdas": [0.75], "n_states": 1,
        "grid": {"x_min": -10, "x_max": 10, "n_points": 2001}})
    out = tmp_path / "o.csv"
    assert run(capsys, "spectrum", "--config", cfg, "--out", str(out))[0] == 0
    _, rows = read_table(out)
    assert float(rows[0]["E_grid"]) == pytest.approx(0.25, rel=1e-3)


def test_spectrum_tolerance_exit(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"potential": {"kind": "box", "L": 1}, "lambdas": [0]})
    code, report, _ = run(capsys, "spectrum", "--config", cfg, "--tolerance", "1e-9",
                          "--out", str(tmp_path / "o.csv"))
    assert code == 1
    assert report["warnings"]


@pytest.mark.parametrize("cfg", [
    {"potential": {"kind": "box", "L": 1}, "lambdas": [0], "unknown": 1},
    {"potential": {"kind": "box", "L": -1}, "lambdas": [0]},
    {"potential": {"kind": "box", "L": 1}, "lambdas": [1.5]},
    {"potential": {"kind": "box", "L": 1}},
])
def test_malformed_config(tmp_path, capsys, cfg):
    path = write_config(tmp_path, "c.json", cfg)
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "spectrum", "--config", path, "--out", str(out))
    assert code == 2
    assert "error" in report
    assert not out.exists()


def test_bad_schema_version_and_json(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"schema_version": 2, "potential": {"kind": "box", "L": 1}, "lambdas": [0]}))
    assert run(capsys, "spectrum", "--config", str(path))[0] == 2
    path.write_text("{not json")
    assert run(capsys, "spectrum", "--config", str(path))[0] == 2
    assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_doublewell(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "well": {"V0": 2, "a": 1}, "lambdas": [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1],
        "grid": {"x_min": -4, "x_max": 4, "n_points": 1601}, "times": [0, 1]})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "doublewell", "--config", cfg, "--out", str(out))
    assert code == 0
    _, rows = read_table(out)
    assert len(rows) == 11
    gaps = [float(r["two_level_gap"]) for r in rows]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    last = rows[-1]
    assert last["singular"] == "1" and float(last["two_level_gap"]) == 0.0
    assert math.isnan(float(last["delta"]))
    assert float(last["P_t=1"]) == 1.0
    assert "grid_gap" in rows[0]


def test_thermo_shape_and_warnings(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "lambdas": [0, 0.25, 0.5, 0.75, 1], "u_min": 0.05, "u_max": 6, "u_step": 0.05})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "thermo", "--config", cfg, "--out", str(out))
    assert code == 0
    meta, rows = read_table(out)
    assert len(rows) == 120 and len(rows[0]) == 11
    s1 = [float(r["S/k(lambda=1)"]) for r in rows]
    u = [float(r["u"]) for r in rows]
    cross = [u[i] for i in range(len(u) - 1) if s1[i] > 0 >= s1[i + 1]]
    assert cross and abs(cross[0] - math.e) < 0.05
    assert sum("lambda=0;" in w or "lambda=0.5;" in w for w in report["warnings"]) == 2
    assert any("u* = e" in m for m in meta)


def test_thermo_deterministic(tmp_path, capsys, monkeypatch):
    cfg = write_config(tmp_path, "c.json", {"lambdas": [0, 1], "u_min": 0.1, "u_max": 3, "u_step": 0.1})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "thermo", "--config", cfg, "--out", str(a))
    monkeypatch.setenv("QCINTERP_THREADS", "3")
    run(capsys, "thermo", "--config", cfg, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_threads_env_invalid(tmp_path, capsys, monkeypatch):
    cfg = write_config(tmp_path, "c.json", {"lambdas": [0], "u_min": 1, "u_max": 2, "u_step": 1})
    monkeypatch.setenv("QCINTERP_THREADS", "-1")
    assert run(capsys, "thermo", "--config", cfg)[0] == 2


def test_json_format(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"lambdas": [1], "u_min": 1, "u_max": 2, "u_step": 0.5})
    code, _, out = run(capsys, "thermo", "--config", cfg, "--format", "json")
    doc = json.loads(out)
    assert doc["columns"] == ["u", "F/kT(lambda=1)", "S/k(lambda=1)"]
    assert len(doc["rows"]) == 3


def test_evolve_free_and_norm(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "grid": {"x_min": -40, "x_max": 40, "n_points": 4001}, "potential": {"kind": "free"},
        "lambda": 0, "dt": 0.01, "steps": 300, "save_every": 50,
        "branches": [{"kind": "gaussian", "x0": 0, "sigma": 1}]})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "evolve", "--config", cfg, "--out", str(out))
    assert code == 0
    _, rows = read_table(out)
    for r in rows:
        assert float(r["width"]) == pytest.approx(float(r["free_width_analytic"]), rel=5e-3)
        assert float(r["norm_dev"]) < 1e-8


def test_evolve_crossing_event(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "grid": {"x_min": -20, "x_max": 20, "n_points": 2001}, "potential": {"kind": "free"},
        "lambda": 1, "dt": 0.002, "steps": 750, "save_every": 5,
        "branches": [{"kind": "gaussian", "x0": -1, "sigma": 2, "p": 1},
                     {"kind": "gaussian", "x0": 1, "sigma": 2, "p": -1}]})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "evolve", "--config", cfg, "--out", str(out))
    assert code == 0
    assert len(report["events"]) == 1
    t_cross = float(report["events"][0].rsplit("t=", 1)[1])
    assert t_cross == pytest.approx(1.0, abs=1e-2)
    code, report, _ = run(capsys, "evolve", "--config", cfg, "--out", str(out), "--seed-positions=-1,1")
    assert any("branch 0 seed 0 and branch 1 seed 1" in e for e in report["events"])


def test_evolve_solver_failure(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "grid": {"x_min": -10, "x_max": 10, "n_points": 1001}, "potential": {"kind": "free"},
        "lambda": 1, "dt": 0.005, "steps": 2000,
        "branches": [{"kind": "gaussian", "x0": 0, "sigma": 0.5, "p": 1}]})
    out = tmp_path / "o.csv"
    code, report, _ = run(capsys, "evolve", "--config", cfg, "--out", str(out))
    assert code == 3
    assert report["error_step"] > 0
    assert not out.exists()


def test_oscillate(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "drive": {"omega_drive": 1, "t_start": 0, "t_end": math.pi, "n_samples": 13}, "u": 2})
    out = tmp_path / "o.csv"
    assert run(capsys, "oscillate", "--config", cfg, "--out", str(out))[0] == 0
    _, rows = read_table(out)
    labels = {r["state"] for r in rows}
    assert {"LDL-like", "HDL-like"} <= labels
    flagged = [float(r["lambda"]) for r in rows if r["equal_share"] == "1"]
    assert flagged == pytest.approx([0.5, 0.5])

    cfg2 = write_config(tmp_path, "d.json", {
        "drive": {"omega_drive": 1, "t_start": 0, "t_end": 1, "n_samples": 2}, "u": 2})
    assert run(capsys, "oscillate", "--config", cfg2, "--out", str(out))[0] == 0
    assert len(read_table(out)[1]) == 2


def test_compensation(tmp_path, capsys):
    table = tmp_path / "in.csv"
    table.write_text("label,delta_H,delta_S\na,610,2\nb,315,1\nc,13,0.01\n")
    cfg = write_config(tmp_path, "c.json", {"T_c": 300, "omega": 20})
    out = tmp_path / "o.csv"
    code, _, _ = run(capsys, "compensation", "--config", cfg, "--input", str(table), "--out", str(out))
    assert code == 0
    meta, rows = read_table(out)
    assert [float(r["residual"]) for r in rows] == pytest.approx([0, 5, 0], abs=1e-12)
    assert "# max_abs_residual: 5" in meta


def test_compensation_parse_error(tmp_path, capsys):
    table = tmp_path / "in.csv"
    table.write_text("delta_H,delta_S\n1,1\n2,\n")
    cfg = write_config(tmp_path, "c.json", {"T_c": 1, "zpe": 0})
    code, report, _ = run(capsys, "compensation", "--config", cfg, "--input", str(table))
    assert code == 2
    assert report["error_row"] == 2
    assert "row 2" in report["error"]


def test_compensation_wavenumber(tmp_path, capsys):
    table = tmp_path / "in.csv"
    table.write_text("delta_H,delta_S\n1000,1\n")
    cfg = write_config(tmp_path, "c.json", {"T_c": 300, "wavenumber_cm": 3400})
    out = tmp_path / "o.csv"
    assert run(capsys, "compensation", "--config", cfg, "--input", str(table), "--out", str(out))[0] == 0
    _, rows = read_table(out)
    assert float(rows[0]["zpe"]) == pytest.approx(molar_zpe_from_wavenumber(3400), rel=1e-11)


def test_usage_error_still_reports(capsys):
    code, report, _ = run(capsys, "spectrum")
    assert code == 2
    assert "usage" in report["error"]


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"lambdas": [1], "u_min": 1, "u_max": 2, "u_step": 1})
    cp = subprocess.run([sys.executable, "-m", "qcinterp", "thermo", "--config", cfg],
                        capture_output=True, text=True)
    assert cp.returncode == 0, cp.stderr
    assert cp.stdout.startswith("# command: thermo\n")
    cp = subprocess.run([sys.executable, "-m", "qcinterp", "--help"], capture_output=True, text=True)
    assert cp.returncode == 0 and "spectrum" in cp.stdout
