import csv
import io
import json
import math

import numpy as np
import pytest

from xxzthermo.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from xxzthermo.verify import CheckResult

GAMMA = "1.0471975512"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_charge_csv(capsys):
    code, out, _ = run(capsys, "solve", "--quantity", "charge", "--gamma", GAMMA, "--q", "1.5", "--n", "128")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "value"]
    assert len(rows) == 129
    Z = np.array([float(r[1]) for r in rows[1:]])
    assert np.all((Z > 0.75) & (Z < 1.0))
    # 17 significant digits round-trip exactly
    assert all(float(c) == float(format(float(c), ".17g")) for r in rows[1:] for c in r)


@pytest.mark.parametrize("quantity", ["density", "energy", "momentum"])
def test_solve_other_quantities(capsys, quantity):
    code, out, _ = run(capsys, "solve", "--quantity", quantity, "--gamma", GAMMA, "--q", "1",
                       "--h", "0.5", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["lambda"]) == len(data["value"]) == 128


def test_fermi_json(capsys):
    code, out, _ = run(capsys, "fermi", "--gamma", GAMMA, "--j", "1", "--h", "0.3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert set(data) == {"q_f", "z_f", "p_f", "v_f", "residual"}
    assert data["q_f"] == pytest.approx(1.244718559072396, abs=1e-9)
    assert abs(data["residual"]) < 1e-10


def test_fermi_csv_and_delta(capsys):
    code, out, _ = run(capsys, "fermi", "--delta", "0.5", "--h", "0.3", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["q_f", "z_f", "p_f", "v_f", "residual"]
    assert float(rows[1][0]) == pytest.approx(1.244718559072396, abs=1e-9)


def test_fermi_saturated(capsys):
    code, out, _ = run(capsys, "fermi", "--gamma", GAMMA, "--h", "6.5")
    assert code == EXIT_OK
    assert json.loads(out)["q_f"] == 0.0


def test_magnetic(capsys):
    code, out, _ = run(capsys, "magnetic", "--gamma", GAMMA, "--m", "0.3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["q_m"] == pytest.approx(0.3490590221170984, abs=1e-9)
    assert abs(data["residual"]) < 1e-10 and data["dq_dm"] > 0


def test_asympt(capsys):
    code, out, _ = run(capsys, "asympt", "--gamma", str(math.pi / 2), "--h", "0.001")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["epsilon_gamma"] == pytest.approx(2.0)
    assert data["rho_amplitude"] == pytest.approx(2 / math.pi)
    assert data["q_f"] == pytest.approx(4.493598410330986, rel=1e-13)
    code, out, _ = run(capsys, "asympt", "--gamma", "0.3")
    assert code == EXIT_OK and set(json.loads(out)) == {"epsilon_gamma", "z_limit"}


def test_kernel_table(capsys):
    for which in ("K", "fourier", "R", "G", "bare-energy"):
        code, out, _ = run(capsys, "kernel", "--gamma", GAMMA, "--which", which, "--h", "0.2",
                           "--points", "11")
        assert code == EXIT_OK
        assert out.count("\n") == 12


def test_bank(capsys, tmp_path):
    target = tmp_path / "bank.csv"
    code, out, _ = run(capsys, "bank", "--gamma", str(math.pi / 6), "--h", "0.2", "--points", "21",
                       "--out", str(target))
    assert code == EXIT_OK and out == ""
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["lambda", "value"]
    assert min(float(r[1]) for r in rows[1:]) > 0.05


def test_bank_wrong_regime(capsys):
    code, _, err = run(capsys, "bank", "--gamma", "2.0", "--h", "0.2")
    assert code == EXIT_DOMAIN and "domain error" in err


def test_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["solve", "--quantity", "energy", "--gamma", GAMMA, "--q", "1", "--h", "0.4",
                     "--out", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_verbose_goes_to_stderr(capsys):
    code, out, err = run(capsys, "--verbose", "solve", "--quantity", "charge", "--gamma", GAMMA, "--q", "1")
    assert code == EXIT_OK
    assert "finished in" in err and "finished" not in out


@pytest.mark.parametrize("argv", [
    ["solve", "--gamma", GAMMA, "--q", "1"],
    ["solve", "--quantity", "charge", "--gamma", GAMMA, "--q", "1", "--n", "127"],
    ["solve", "--quantity", "charge", "--gamma", GAMMA, "--delta", "0.5", "--q", "1"],
    ["fermi", "--gamma", "abc"],
    ["teleport"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["fermi", "--gamma", "4.0", "--h", "0.3"],
    ["fermi", "--delta", "1.5", "--h", "0.3"],
    ["fermi", "--gamma", GAMMA, "--h", "0"],
    ["magnetic", "--gamma", GAMMA, "--m", "0.5"],
    ["asympt", "--gamma", "0.3", "--h", "0.01"],
])
def test_domain_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN and err


def test_missing_gamma(capsys):
    code, _, _ = run(capsys, "fermi", "--h", "0.3")
    assert code == EXIT_USAGE


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--gamma", GAMMA, "--h-min", "0.01", "--h-max", "7",
                       "--points", "8", "--log", "--workers", "2")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["h", "q_f", "z_f", "p_f", "v_f"]
    h = [float(r[0]) for r in rows[1:]]
    assert h == sorted(h) and len(h) == 8
    assert float(rows[-1][1]) == 0.0


def test_scan_serial_matches_pool(capsys):
    argv = ["scan", "--gamma", GAMMA, "--h-min", "0.1", "--h-max", "2", "--points", "4"]
    _, pooled, _ = run(capsys, *argv, "--workers", "3")
    _, serial, _ = run(capsys, *argv, "--workers", "1")
    assert pooled == serial


def test_verify_acceptance(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "acceptance")
    assert code == EXIT_OK
    assert out.count("[PASS]") == 13 and "13/13" in out


def test_verify_failure_exit(capsys, monkeypatch):
    bad = [CheckResult("broken", False, 1.0, 0.0, "")]
    monkeypatch.setattr("xxzthermo.cli.run_suite", lambda suite, count: bad)
    code, out, _ = run(capsys, "verify", "--suite", "all", "--gamma-grid", "2")
    assert code == EXIT_VERIFY and "[FAIL] broken" in out


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "xxz-thermo" in capsys.readouterr().out
