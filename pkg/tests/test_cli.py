import json
import subprocess
import sys

import pytest

from spinhall_ising.cli import EXIT_FAILED, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, main
from spinhall_ising.params import DeviceParams, save_params
from spinhall_ising.problems import WeightedGraph, glyph


def read_json(path):
    return json.loads(path.read_text())


@pytest.fixture
def maxcut_file(tmp_path):
    path = tmp_path / "g.txt"
    WeightedGraph(6, ((0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 3), (4, 5, 1), (0, 5, 2), (1, 4, 1))).save(path)
    return path


def test_solve_coloring_demo(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["solve", "coloring", "demo:triangle-k3", "--seed", "3", "--out", str(out), "--oracle"])
    assert rc == EXIT_OK
    summary = read_json(out / "summary.json")
    assert summary["coloring"]["proper"] is True
    assert summary["penalty"] == 0
    assert summary["target_reached"] is True
    assert summary["seed"] == 3
    assert summary["iterations"]["spin_updates"] == 9 * summary["iterations"]["sweeps"]
    assert summary["params_digest"] == DeviceParams.calibrated().digest()
    assert "penalty = 0" in capsys.readouterr().out
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == "sweep,energy,flips"
    assert len(lines) == summary["sweeps"] + 2


def test_solve_digits_writes_pgm_snapshots(tmp_path):
    out = tmp_path / "d"
    rc = main(["solve", "digits", "glyphs:1", "--seed", "1", "--sweeps", "450", "--out", str(out)])
    assert rc == EXIT_OK
    names = sorted(p.name for p in out.iterdir())
    assert {"state_initial.pgm", "state_sweep00400.pgm", "state_final.pgm", "summary.json"} <= set(names)
    assert read_json(out / "summary.json")["iterations"]["sweeps"] == 450


def test_trace_available_without_convergence(tmp_path, maxcut_file):
    out = tmp_path / "m"
    rc = main(["solve", "maxcut", str(maxcut_file), "--seed", "2", "--sweeps", "3", "--target-energy", "-1000",
               "--strict", "--out", str(out)])
    assert rc == EXIT_NOT_CONVERGED
    assert len((out / "trace.csv").read_text().splitlines()) == 5
    assert read_json(out / "summary.json")["target_reached"] is False


def test_solve_then_verify_round_trip_and_tamper(tmp_path, maxcut_file, capsys):
    out = tmp_path / "m"
    assert main(["solve", "maxcut", str(maxcut_file), "--seed", "4", "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", str(maxcut_file), str(out / "solution.json"), "--oracle"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["verified"] is True
    assert "optimal" in report
    sol = read_json(out / "solution.json")
    sol["energy"] -= 2
    (tmp_path / "bad.json").write_text(json.dumps(sol))
    assert main(["verify", str(maxcut_file), str(tmp_path / "bad.json")]) == EXIT_FAILED
    report = json.loads(capsys.readouterr().out)
    assert "energy" in report["mismatches"]


def test_solve_is_deterministic(tmp_path, maxcut_file):
    for name in ("a", "b"):
        assert main(["solve", "maxcut", str(maxcut_file), "--seed", "9", "--order", "random", "--out",
                     str(tmp_path / name)]) == EXIT_OK
    for f in ("trace.csv", "solution.json", "summary.json", "state_final.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_oracle_command(tmp_path, capsys):
    assert main(["oracle", "coloring", "demo:triangle-k3"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["n_ground_states"] == 6
    assert report["best_score"]["penalty"] == 0
    assert main(["oracle", "digits", "glyphs:0"]) == EXIT_USAGE
    assert "exceeds" in capsys.readouterr().err


def test_majority_backend_and_custom_schedule(tmp_path, maxcut_file):
    out = tmp_path / "maj"
    rc = main(["solve", "maxcut", str(maxcut_file), "--backend", "majority", "--schedule", "0:60-120",
               "--sweeps", "5", "--seed", "0", "--out", str(out)])
    assert rc == EXIT_OK
    s = read_json(out / "summary.json")
    assert s["backend"] == {"backend": "majority"}
    assert s["schedule"] == "0:60-120"


def test_llg_backend_small_run(tmp_path):
    spec = tmp_path / "pair.json"
    spec.write_text(json.dumps({"n": 2, "k": 1, "edges": []}))
    out = tmp_path / "llg"
    rc = main(["solve", "coloring", str(spec), "--backend", "llg", "--sweeps", "2", "--seed", "1",
               "--out", str(out)])
    assert rc == EXIT_OK
    assert read_json(out / "summary.json")["backend"]["backend"] == "llg"


def test_device_sweep_and_curve_reuse(tmp_path, capsys):
    out = tmp_path / "sw"
    rc = main(["device", "sweep", "--sweep", "60:120:30", "--trials", "20", "--seed", "5", "--quiet",
               "--out", str(out)])
    assert rc == EXIT_OK
    assert "50% crossing" in capsys.readouterr().out
    meta = read_json(out / "switch_curve.csv.json")
    assert meta["n_trials"] == 20 and meta["low_statistics"] is True
    assert meta["sweep_uA"] == [60.0, 120.0, 30.0]
    rc = main(["solve", "coloring", "demo:square-k2", "--curve", str(out / "switch_curve.csv"),
               "--schedule", "0:60-120", "--sweeps", "5", "--seed", "1", "--out", str(tmp_path / "s")])
    assert rc == EXIT_OK


def test_device_calibrate(tmp_path, capsys):
    out = tmp_path / "cal"
    rc = main(["device", "calibrate", "--trials", "20", "--scale-min", "2", "--scale-max", "6", "--seed", "1",
               "--out", str(out)])
    assert rc == EXIT_OK
    cal = read_json(out / "calibration.json")
    assert 2 < cal["torque_scale"] < 6
    assert "torque_scale" in (out / "params.txt").read_text()


def test_params_dir_and_config(tmp_path, monkeypatch, maxcut_file):
    pdir = tmp_path / "pdir"
    pdir.mkdir()
    save_params(DeviceParams.calibrated().replace(V_DD=0.5), pdir / "half.txt")
    monkeypatch.setenv("SPINHALL_ISING_PARAMS_DIR", str(pdir))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sweeps": 4, "seed": 11, "params": "half.txt"}))
    out = tmp_path / "o"
    assert main(["solve", "maxcut", str(maxcut_file), "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    s = read_json(out / "summary.json")
    assert s["sweeps"] == 4 and s["seed"] == 11
    assert s["params_digest"] == DeviceParams.calibrated().replace(V_DD=0.5).digest()


def test_usage_errors(tmp_path, capsys, maxcut_file):
    bad = tmp_path / "bad.txt"
    bad.write_text("alpha = 0.1\nnope = 3\n")
    assert main(["solve", "maxcut", str(maxcut_file), "--params", str(bad), "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert ":2:" in capsys.readouterr().err
    assert main(["solve", "coloring", "demo:nothing", "--out", str(tmp_path / "x")]) == EXIT_USAGE
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": 1}))
    assert main(["solve", "maxcut", str(maxcut_file), "--config", str(cfg)]) == EXIT_USAGE
    g = tmp_path / "g.txt"
    g.write_text("0 1 1\n1 x 1\n")
    assert main(["solve", "maxcut", str(g), "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert ":2:" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["solve", "maxcut"])
    assert info.value.code == 2


def test_pgm_problem(tmp_path):
    path = tmp_path / "t.pgm"
    glyph(4).save_pgm(path)
    out = tmp_path / "p"
    assert main(["solve", "digits", str(path), "--sweeps", "2", "--seed", "0", "--out", str(out)]) == EXIT_OK


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "spinhall_ising.cli", "oracle", "coloring", "demo:square-k2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["n_ground_states"] == 2
