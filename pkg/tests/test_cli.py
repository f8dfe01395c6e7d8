import csv
import io
import json
import shutil
import subprocess

import pytest

from escreg.cli import fmt, main


def scenario_file(tmp_path, **cfg):
    base = {"T": 2.0, "omega": 100.0}
    base.update(cfg)
    p = tmp_path / "sc.json"
    p.write_text(json.dumps(base))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_fmt_nine_significant_digits():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(123456789012.0) == "1.23456789e+11"
    assert fmt(2) == "2"


def test_run_writes_trajectory(tmp_path):
    out = tmp_path / "traj.csv"
    assert main(["run", "--scenario", scenario_file(tmp_path), "--out", str(out)]) == 0
    rows = read_csv(out)
    header = rows[0]
    assert header == ["t", "e", "y", "v1", "v2", "z1", "z2", "eta1", "eta2", "eta3", "eta4", "pi",
                      "vt1", "vt2", "vt3", "vt4", "u"]
    assert float(rows[1][0]) == 0.0
    assert float(rows[-1][0]) == pytest.approx(2.0)
    assert all(len(r) == len(header) for r in rows)
    assert float(rows[1][7]) == pytest.approx(0.1589)
    assert out.read_bytes().count(b"\r\n") == len(rows)


def test_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--scenario", scenario_file(tmp_path), "--omegas", "50,100", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["omega", "ultimate_bound_e", "sup_dev_vs_averaged", "vartheta_err_final"]
    assert [float(r[0]) for r in rows[1:]] == [50.0, 100.0]


def test_verify_averaging(tmp_path):
    out = tmp_path / "dev.csv"
    assert main(["verify-averaging", "--scenario", scenario_file(tmp_path), "--omegas", "100,400",
                 "--T", "1.0", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["omega", "sup_deviation", "final_deviation"]
    assert len(rows) == 3
    assert all(float(x) >= 0 for r in rows[1:] for x in r)


def test_oracle_dump_to_stdout(tmp_path, capsys):
    assert main(["oracle", "dump", "--scenario", scenario_file(tmp_path)]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["signal", "index", "omega", "cos", "sin"]
    u = [r for r in rows[1:] if r[0] == "u"]
    third = [r for r in u if float(r[2]) == pytest.approx(3 * 3.14159265358979 / 12, rel=1e-8)]
    assert float(third[0][3]) == pytest.approx(-0.25, abs=1e-9)


@pytest.mark.parametrize("cfg", [{"b": 0}, {"controller": "C"}, {"alpha": -1}, {"rho": {"coeffs": [0.5]}},
                                 {"m": [1, 2]}, {"dt": 1.0}, {"T": -1}])
def test_bad_config_exit_code(tmp_path, cfg):
    assert main(["run", "--scenario", scenario_file(tmp_path, **cfg), "--out", str(tmp_path / "x.csv")]) == 3


def test_missing_scenario_file(tmp_path):
    assert main(["run", "--scenario", str(tmp_path / "nope.json")]) == 3


def test_bad_omegas(tmp_path):
    assert main(["sweep", "--scenario", scenario_file(tmp_path), "--omegas", "a,b"]) == 3


def test_diverged_exit_code(tmp_path):
    sc = scenario_file(tmp_path, T=5.0, omega=50.0, alpha=1e4, k=10.0)
    assert main(["run", "--scenario", sc, "--out", str(tmp_path / "x.csv")]) == 2


@pytest.mark.skipif(shutil.which("escreg") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["escreg", "oracle", "dump", "--scenario", scenario_file(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("signal,index,omega,cos,sin")
