import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from nonmarkov.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, config_from_dict, main, parse_matrix, simulate
from nonmarkov.maps import AForm, map_to_json, pseudo_inverse_a
from nonmarkov.master import read_trajectory_csv

from conftest import swap_a


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(tmp_path, cfg, *extra):
    out = tmp_path / "traj.csv"
    code = main(["run", "--config", write(tmp_path / "cfg.json", cfg), "--out", str(out), *extra])
    return code, out


def test_parse_matrix_forms():
    np.testing.assert_array_equal(parse_matrix([[1, 0], [0, 1]]), np.eye(2))
    np.testing.assert_array_equal(parse_matrix([1, 0, 0, 1], 2), np.eye(2))
    np.testing.assert_array_equal(parse_matrix([[0, 0], [0, -1], [0, 1], [0, 0]], 2), np.array([[0, -1j], [1j, 0]]))


def test_run_swap_recurrence(tmp_path, capsys):
    code, out = run(tmp_path, {"scenario": "swap-qubit", "bloch": [1, 0, 0], "t1": math.pi, "dt": 0.01})
    assert code == EXIT_OK
    cols = read_trajectory_csv(out)
    assert cols["t"][-1] == pytest.approx(math.pi)
    assert cols["a1"][-1] == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(cols["a1"], np.cos(cols["t"]) ** 2, atol=1e-10)
    stdout = capsys.readouterr().out
    assert "final_bloch_norm" in stdout and "max_trace_error" in stdout


def test_run_truncated(tmp_path):
    code, out = run(tmp_path, {"scenario": "truncated", "bloch": [1, 0, 0], "t1": 1.0})
    assert code == EXIT_OK
    assert read_trajectory_csv(out)["a1"][-1] == pytest.approx(0.367879, abs=1e-6)


def test_run_lindblad(tmp_path):
    code, out = run(tmp_path, {"scenario": "lindblad", "gamma": 1.0, "bloch": [1, 0, 0], "t1": 1.0})
    assert code == EXIT_OK
    assert read_trajectory_csv(out)["a1"][-1] == pytest.approx(math.exp(-1), abs=1e-8)


def test_run_collision(tmp_path):
    code, out = run(tmp_path, {"scenario": "collision", "bloch": [1, 0, 0], "T": math.pi / 3, "N": 2})
    assert code == EXIT_OK
    np.testing.assert_allclose(read_trajectory_csv(out)["a1"], [1, 0.25, 1 / 16], atol=1e-12)


def test_run_custom_master(tmp_path):
    h = 0.5 * sum(np.kron(p, p) for p in (np.array([[0, 1], [1, 0]]), np.diag([1, -1])))
    cfg = {
        "scenario": "custom",
        "hamiltonian": h.real.tolist(),
        "tau": [[0.5, 0], [0, 0.5]],
        "bloch": [0.3, 0.0, 0.5],
        "t1": 0.5,
        "dt": 0.01,
        "method": "master",
    }
    code, out = run(tmp_path, cfg)
    assert code == EXIT_OK
    cols = read_trajectory_csv(out)
    ref_dir = tmp_path / "ref"
    ref_dir.mkdir()
    code, ref_out = run(ref_dir, dict(cfg, method="map"))
    ref = read_trajectory_csv(ref_out)
    for k in ("a1", "a2", "a3"):
        np.testing.assert_allclose(cols[k], ref[k], atol=1e-7)


@pytest.mark.parametrize(
    "cfg",
    [
        {"scenario": "swap-qubit", "bloch": [0.2, 0.5, -0.3], "t1": 1.0, "dt": 0.05, "method": "master"},
        {"scenario": "swap-qubit", "bloch": [0.2, 0.5, -0.3], "t1": 6.0, "dt": 0.05},
        {"scenario": "lindblad", "gamma": 2.0, "bloch": [0, 0, 1], "t1": 2.0},
        {"scenario": "truncated", "bloch": [0, 1, 0], "t1": 3.0, "dt": 0.01},
        {"scenario": "collision", "bloch": [0, 0, 1], "T": 0.4, "N": 30},
    ],
)
def test_trace_on_every_row(cfg):
    traj = simulate(config_from_dict(cfg))
    assert np.max(np.abs(traj.traces - 1)) < 1e-7
    assert np.min(traj.min_eig) >= -1e-7


def test_outputs_are_byte_identical(tmp_path):
    cfg = {"scenario": "swap-qubit", "bloch": [0.2, 0.5, -0.3], "t1": 0.5, "dt": 0.01, "method": "master"}
    _, out = run(tmp_path, cfg)
    first = out.read_bytes()
    _, out = run(tmp_path, cfg)
    assert out.read_bytes() == first
    m = write(tmp_path / "m.json", map_to_json(AForm(2, swap_a(0.25))))
    reports = []
    for name in ("r1.json", "r2.json"):
        assert main(["analyze-map", m, "--seed", "5", "--out", str(tmp_path / name)]) == EXIT_OK
        reports.append((tmp_path / name).read_bytes())
    assert reports[0] == reports[1]


def test_sweep(tmp_path, capsys):
    cfg = {"scenario": "truncated", "bloch": [1, 0, 0], "t1": 1.0}
    code, out = run(tmp_path, cfg, "--sweep", "t1=0.5,1.0")
    assert code == EXIT_OK
    a = [read_trajectory_csv(tmp_path / f"traj_{i}.csv")["a1"][-1] for i in (0, 1)]
    np.testing.assert_allclose(a, [math.exp(-0.25), math.exp(-1)], atol=1e-7)
    code, _ = run(tmp_path, cfg, "--sweep", "bloch=1:0:0,0:0.5:0")
    assert code == EXIT_OK
    assert read_trajectory_csv(tmp_path / "traj_1.csv")["a2"][0] == 0.5
    assert "[1] scenario" in capsys.readouterr().out


def test_flags_override_config(tmp_path):
    code, out = run(tmp_path, {"scenario": "truncated", "bloch": [1, 0, 0], "t1": 5.0}, "--t1", "1.0", "--dt", "0.01")
    assert code == EXIT_OK
    cols = read_trajectory_csv(out)
    assert cols["t"][-1] == 1.0 and len(cols["t"]) == 101


@pytest.mark.parametrize(
    "cfg",
    [
        {"scenario": "nonsense"},
        {"scenario": "custom", "bloch": [1, 0, 0]},
        {"scenario": "swap-qubit", "bloch": [1, 0]},
        {"scenario": "swap-qubit", "bloch": [1, 1, 1]},
        {"scenario": "truncated", "t0": 1.0, "t1": 1.0},
        {"scenario": "custom", "hamiltonian": [[1, 0], [0, 1]], "tau": [[0.5, 0], [0, 0.5]]},
    ],
)
def test_run_config_errors(tmp_path, cfg, capsys):
    code, _ = run(tmp_path, cfg)
    assert code == EXIT_CONFIG
    assert capsys.readouterr().err


def test_missing_and_malformed_files(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json"), "--out", "x.csv"]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad), "--out", "x.csv"]) == EXIT_CONFIG
    assert main(["analyze-map", str(bad)]) == EXIT_CONFIG
    assert main(["analyze-map", write(tmp_path / "m.json", {"dim": 2, "form": "A", "entries": [[1, 0]]})]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG


def test_numerical_refusal(tmp_path):
    cfg = {"scenario": "swap-qubit", "bloch": [1, 0, 0], "t1": 2.0, "dt": 0.01, "method": "master"}
    code, _ = run(tmp_path, cfg)
    assert code == EXIT_NUMERICAL
    assert main(["canonical", "--t1", str(math.pi / 2), "--t2", "0.3"]) == EXIT_NUMERICAL


@pytest.mark.parametrize(
    "a, spectrum, cp",
    [
        (swap_a(0.25), [0.875, 0.375, 0.375, 0.375], True),
        (pseudo_inverse_a(AForm(2, swap_a(0.25))).form.matrix, [6.5, -1.5, -1.5, -1.5], False),
        (np.eye(4), [2, 0, 0, 0], True),
    ],
)
def test_analyze_map_examples(tmp_path, a, spectrum, cp):
    m = write(tmp_path / "m.json", map_to_json(AForm(2, a)))
    out = tmp_path / "report.json"
    assert main(["analyze-map", m, "--samples", "100", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    np.testing.assert_allclose(report["choi_spectrum"], spectrum, atol=1e-12)
    assert report["completely_positive"] is cp
    assert report["trace_preserving"] and report["hermiticity_preserving"]
    assert report["pseudo_inverse_rank"] == 4


def test_canonical_examples(tmp_path):
    out = tmp_path / "c.json"
    assert main(["canonical", "--t1", "0.7", "--t2", "0.7", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    np.testing.assert_allclose(report["choi_spectrum"], [2, 0, 0, 0], atol=1e-12)
    assert report["group_law_residual"] < 1e-9
    args = ["canonical", "--t1", str(math.pi / 3), "--t2", str(math.pi / 4), "--out", str(out)]
    assert main(args) == EXIT_OK
    report = json.loads(out.read_text())
    np.testing.assert_allclose(report["choi_spectrum"], [3.5, -0.5, -0.5, -0.5], atol=1e-8)
    assert report["completely_positive"] is False
    assert report["compatibility_radius_t1"] == pytest.approx(0.25, abs=1e-6)
    assert report["group_law_residual"] < 1e-9


@pytest.mark.skipif(shutil.which("nonmarkov") is None, reason="console script not installed")
def test_console_script(tmp_path):
    m = write(tmp_path / "m.json", map_to_json(AForm.identity(2)))
    proc = subprocess.run(["nonmarkov", "analyze-map", m], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "completely_positive: True" in proc.stdout
