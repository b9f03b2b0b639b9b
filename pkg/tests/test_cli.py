import csv
import io
import json
import math
from pathlib import Path

import pytest

from manometer.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = Path(__file__).parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return json.loads(text)["data"]


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--no-meta")
    assert code == 0
    rows = [r for r in records(out) if r["j_W"] == 0]
    e1 = math.pi**2 / 2 / 1e-6
    assert [r["E_gas"] / e1 for r in rows] == pytest.approx([1, 4, 9], rel=1e-11)


def test_spectrum_3d_columns(capsys):
    code, out, _ = run(capsys, "spectrum", "--no-meta", "--dims", "1", "2", "3", "-f", "csv")
    header = out.splitlines()[0].split(",")
    assert header[-3:] == ["E_axis1", "E_axis2", "E_axis3"]


def test_malformed_config(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"truncation": {"n_wal": 3}}))
    code, _, err = run(capsys, "spectrum", "-c", str(f))
    assert code == 2
    assert "truncation.n_wal" in err


def test_zero_box_index(capsys):
    code, _, err = run(capsys, "observables", "--j-g", "0")
    assert code == 2 and "j_g" in err


def test_observables_values(capsys, tmp_path):
    rho = tmp_path / "rho.csv"
    code, out, _ = run(capsys, "observables", "--no-meta", "--rho-out", str(rho))
    assert code == 0
    vals = {(r["section"], r["quantity"]): r["value"] for r in records(out)}
    assert vals[("wall", "x_wall_closed")] == pytest.approx(9.8696e-6, rel=1e-4)
    assert vals[("wall", "variance_state")] == pytest.approx(5.0e-7, rel=1e-3)
    assert 5e-9 < vals[("entanglement", "purity_deficit")] < 1.2e-8
    assert not any(k[0] == "pressure" for k in vals)
    m = list(csv.reader(rho.open()))
    assert len(m) == 8 and len(m[0]) == 8


def test_observables_3d_pressure(capsys):
    code, out, _ = run(capsys, "observables", "--no-meta", "--dims", "1", "1.5", "0.5")
    vals = {(r["section"], r["quantity"]): r["value"] for r in records(out)}
    assert vals[("pressure", "rel_gap")] < 1e-12


def test_resonant_observables(capsys):
    code, _, err = run(capsys, "observables", "-c", str(FIXTURES / "resonance.json"))
    assert code == 1
    assert "(1, 1)" in err


def test_coeffs_deterministic(capsys):
    _, a, _ = run(capsys, "coeffs", "--no-meta", "-f", "csv")
    _, b, _ = run(capsys, "coeffs", "--no-meta", "-f", "csv")
    assert a == b
    assert a.splitlines()[1] == "1,1,Wc,0.00697886419964"


def test_meta_only_in_header(capsys):
    _, out, _ = run(capsys, "coeffs")
    doc = json.loads(out)
    assert "generated" in doc["meta"]
    _, out2, _ = run(capsys, "coeffs")
    assert json.loads(out2)["data"] == doc["data"]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "levels.csv"
    code, out, _ = run(capsys, "spectrum", "--no-meta", "-f", "csv", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("j_g,j_W")


def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify", "--no-meta", "-c", str(CONFIGS / "default.json"))
    statuses = {r["check"]: r["status"] for r in records(out)}
    assert code == 0
    assert set(statuses.values()) == {"pass"}
    assert "oracle_slope" in statuses


def test_verify_quick_skips_oracle(capsys):
    code, out, _ = run(capsys, "verify", "--no-meta", "--quick")
    assert code == 0
    assert not any(r["check"].startswith("oracle") for r in records(out))


def test_verify_resonance_policy(capsys):
    fixture = str(FIXTURES / "resonance.json")
    code, out, _ = run(capsys, "verify", "--no-meta", "-c", fixture)
    assert code == 1
    assert "flagged" in {r["status"] for r in records(out)}
    code, _, _ = run(capsys, "verify", "--no-meta", "-c", fixture, "--allow-flagged")
    assert code == 0


def test_thermal(capsys):
    code, out, _ = run(capsys, "thermal", "--no-meta", "-f", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 20
    assert float(rows[0]["entropy"]) == 0
    assert float(rows[0]["x_wall"]) == pytest.approx(9.8696e-6, rel=1e-4)
    for col in ("mean_energy", "entropy", "x_wall"):
        v = [float(r[col]) for r in rows]
        assert v == sorted(v)


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--no-meta", "-f", "csv", "--jobs", "2", "--n-gas", "20", "--n-wall", "6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["eps", "n_gas", "n_wall", "observable", "pt_value", "oracle_value", "rel_error", "flags"]
    assert len(rows) == 9
