import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from _shared import solution_run
from nsverify import analysis, cli, spectral
from nsverify.exactfield import from_json
from nsverify.flows import FLOW_NAMES, make_abc

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    names = [f["name"] for f in json.loads(out)]
    assert names == list(FLOW_NAMES)


def test_list_export_roundtrip(capsys):
    code, out, _ = run(capsys, "list", "--export", "abc", "--abc", "1", "2", "1/2")
    assert code == 0
    body = json.loads(out)
    assert tuple(from_json(p) for p in body["profiles"]) == make_abc(1, 2, Fraction(1, 2)).profiles
    assert body["params"] == {"a": "1", "b": "2", "c": "1/2"}


def test_verify_unknown_flow(capsys):
    code, out, err = run(capsys, "verify", "no_such_flow")
    assert code == 2 and out == "" and "unknown flow" in err


def test_verify_taylor(capsys):
    code, out, _ = run(capsys, "verify", "taylor")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    entry = next(e for e in report["entries"] if e["check_id"] == "inertial_reference")
    assert entry["status"] == "pass" and entry["witness"] is None
    leray = next(e for e in report["entries"] if e["check_id"] == "leray_numeric")
    assert leray["mode"] == "numeric" and leray["witness"] <= 1e-12


def test_verify_golden_report(capsys):
    code, out, _ = run(capsys, "verify", "taylor", "--exact-only")
    assert json.loads(out) == json.loads((GOLDEN / "verify_taylor.json").read_text(encoding="utf-8"))


def test_verify_abc_and_antuono(capsys):
    for argv in (("verify", "abc", "--abc", "1", "2", "3"), ("verify", "antuono")):
        code, out, _ = run(capsys, *argv)
        assert code == 0, out


def test_verify_solution_exit_code_follows_report(capsys):
    code, out, _ = run(capsys, "verify", "paper_solution")
    report = json.loads(out)
    failing = [e["check_id"] for e in report["entries"] if e["status"] == "fail"]
    # the only failing check is the comparison with the reference pressure
    assert failing == ["pressure_vs_reference"]
    entry = next(e for e in report["entries"] if e["check_id"] == "pressure_vs_reference")
    assert "closest s = -1" in entry["notes"]
    assert code == 1


def test_verify_off_condition_phases(capsys):
    code, out, _ = run(capsys, "verify", "general_xi", "--xi", "0", "0", "0", "--exact-only")
    assert code == 1
    code, _, _ = run(capsys, "verify", "general_xi", "--xi", "1/4", "0", "0")
    assert code == 2


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def test_evolve_zero_time(capsys, tmp_path):
    out = tmp_path / "traj.csv"
    code, stdout, _ = run(capsys, "evolve", "--t-final", "0", "--n", "16", "--out", str(out))
    assert code == 0
    rows = _read_csv(out)
    assert list(rows[0]) == ["t", "L2_error", "energy", "helicity", "max_div"]
    assert len(rows) == 1 and float(rows[0]["L2_error"]) <= 1e-15
    assert json.loads(stdout)["L2_error"] <= 1e-15


def test_evolve_defaults_reach_solver(capsys, monkeypatch):
    calls = {}
    cached = solution_run()[0]

    def fake(flow, n, dt, T, kappa, alpha):
        calls.update(name=flow.name, n=n, dt=dt, T=T, kappa=kappa, alpha=alpha)
        return cached

    monkeypatch.setattr(spectral, "evolve_flow", fake)
    code, out, _ = run(capsys, "evolve")
    summary = json.loads(out)
    assert calls == {"name": "paper_solution", "n": 32, "dt": 5e-3,
                     "T": math.log(2) / (3 * 0.05), "kappa": 0.05, "alpha": None}
    assert code == 0
    assert summary["L2_error"] <= 1e-6
    assert abs(summary["energy_ratio"] - 0.25) <= 1e-5


def test_evolve_abc_energy_exponent(capsys, tmp_path):
    out, ckpt = tmp_path / "abc.csv", tmp_path / "abc.bin"
    kappa = 0.05
    code, _, _ = run(capsys, "evolve", "--flow", "abc", "--abc", "1", "1", "1", "--n", "16",
                     "--t-final", "1", "--kappa", str(kappa), "--out", str(out), "--checkpoint", str(ckpt))
    assert code == 0
    rows = _read_csv(out)
    t = np.array([float(r["t"]) for r in rows])
    e = np.array([float(r["energy"]) for r in rows])
    slope = np.polyfit(t, np.log(e), 1)[0]
    assert abs(-slope - 2 * math.pi ** 2 * kappa) <= 1e-4 * 2 * math.pi ** 2 * kappa
    state = spectral.load_checkpoint(ckpt)
    assert state.n == 16 and math.isclose(state.t, 1.0)


def test_evolve_unstable_step_is_usage_error(capsys):
    code, _, err = run(capsys, "evolve", "--n", "16", "--dt", "5", "--t-final", "10")
    assert code == 2 and "stability bound" in err


def test_evolve_rejects_bad_numbers(capsys):
    assert run(capsys, "evolve", "--kappa", "-1")[0] == 2
    assert run(capsys, "evolve", "--n", "4")[0] == 2
    assert run(capsys, "evolve", "--n", "many")[0] == 2


def test_scan_phases(capsys, tmp_path):
    code, out, _ = run(capsys, "scan-phases")
    assert code == 0
    body = json.loads(out)
    assert ["-1/3", "1/3", "1/2"] in body["phases"]
    assert body == json.loads((GOLDEN / "phase_scan.json").read_text(encoding="utf-8"))
    assert run(capsys, "scan-phases")[1] == out


def test_scan_phases_check(capsys):
    code, out, _ = run(capsys, "scan-phases", "--check")
    assert code == 0 and json.loads(out)["verify_failures"] == []


def test_quadrature_csv(capsys):
    code, out, _ = run(capsys, "quadrature", "--sweep", "default", "--out", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 108
    assert all(r["status"] == "pass" for r in rows)


def test_quadrature_json_file(capsys, tmp_path):
    path = tmp_path / "q.json"
    assert run(capsys, "quadrature", "--out", str(path))[0] == 0
    assert json.loads(path.read_text(encoding="utf-8"))["passed"] is True


def test_sample_point_and_grid(capsys, tmp_path):
    code, out, _ = run(capsys, "sample", "--point", "0", "0", "0")
    assert code == 0
    assert np.allclose(json.loads(out)["velocity"], -math.sqrt(3) / 2)
    path = tmp_path / "grid.csv"
    assert run(capsys, "sample", "--flow", "taylor", "--n", "8", "--out", str(path))[0] == 0
    rows = _read_csv(path)
    assert len(rows) == 512 and list(rows[0]) == ["x1", "x2", "x3", "v1", "v2", "v3"]
    ck = tmp_path / "grid.bin"
    assert run(capsys, "sample", "--n", "8", "--format", "checkpoint", "--out", str(ck))[0] == 0
    assert spectral.load_checkpoint(ck).n == 8


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("NSVERIFY_THREADS", "3")
    assert analysis.worker_count() == 3
    monkeypatch.setenv("NSVERIFY_THREADS", "0")
    assert analysis.worker_count() == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nsverify.cli", "verify", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_missing_subcommand(capsys):
    assert cli.main([]) == 2
