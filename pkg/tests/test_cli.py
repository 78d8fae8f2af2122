import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from burgers_particle.cli import BOUNDS_COLUMNS, TRAJECTORY_COLUMNS, main
from burgers_particle.core import SimConfig, validate_config
from burgers_particle.discretization import run_simulation


def write_config(path, **fields):
    path.write_text(json.dumps(fields))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def sine_json(tmp_path):
    return write_config(tmp_path / "sine.json", K=0.0, h0=0.2, g0=0.5, v0="sin(pi*y)",
                        n_cells=16, dt=4e-3, t_final=4.0)


@pytest.fixture
def equilibrium_json(tmp_path):
    return write_config(tmp_path / "eq.json", K=5.0, h0=0.3, h1=0.3, n_cells=8, dt=1e-2,
                        t_final=0.5)


class TestRun:
    def test_outputs(self, tmp_path, sine_json, capsys):
        out = tmp_path / "out"
        assert main(["run", sine_json, "--out", str(out)]) == 0
        header, data = read_csv(out / "trajectory.csv")
        assert tuple(header) == TRAJECTORY_COLUMNS
        assert np.all(np.isfinite(data)) and data.shape[0] == 1001
        dheader, ddata = read_csv(out / "diagnostics.csv")
        assert dheader[:3] == ["t", "E", "P"] and ddata.shape[0] == data.shape[0]
        assert np.array_equal(ddata[:, 0], data[:, 0])
        summary = json.loads((out / "summary.json").read_text())
        cfg = validate_config(SimConfig.from_json(open(sine_json).read()))
        assert summary["config_digest"] == cfg.digest()
        assert summary["decay"]["rate"] >= 0.25 and summary["decay"]["verdict"] == "PASS"
        assert summary["h_star"]["verdict"] == "PASS"

    def test_seventeen_digits_round_trip(self, tmp_path, sine_json):
        out = tmp_path / "out"
        main(["run", sine_json, "--out", str(out)])
        _, data = read_csv(out / "trajectory.csv")
        cfg = validate_config(SimConfig.from_json(open(sine_json).read()))
        tr = run_simulation(cfg)
        assert np.array_equal(data[:, 1], tr.h) and np.array_equal(data[:, 2], tr.g)
        assert np.array_equal(data[:, 4], tr.dissipation_cum)

    def test_deterministic_with_plots(self, tmp_path, sine_json):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", sine_json, "--out", str(a), "--plots", "--seed", "7"]) == 0
        assert main(["run", sine_json, "--out", str(b), "--plots", "--seed", "7"]) == 0
        names = sorted(p.name for p in a.iterdir())
        assert names == ["diagnostics.csv", "energy.svg", "lyapunov.svg", "position.svg",
                         "summary.json", "trajectory.csv"]
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_equilibrium(self, tmp_path, equilibrium_json):
        out = tmp_path / "out"
        assert main(["run", equilibrium_json, "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["decay"]["violations"] == 0
        _, data = read_csv(out / "trajectory.csv")
        assert np.all(data[:, 3] == 0)

    def test_missing_file(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(tmp_path / "nope.json"), "--out", str(out)]) == 3
        assert not out.exists()

    def test_unwritable_output(self, tmp_path, equilibrium_json):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["run", equilibrium_json, "--out", str(blocker / "sub")]) == 3

    @pytest.mark.parametrize("text", ['{"K": -1}', "{broken", '{"K": 1, "viscosity": 2}',
                                      '{"v0": "nosuch(y)"}'])
    def test_config_errors(self, tmp_path, text, capsys):
        path = tmp_path / "bad.json"
        path.write_text(text)
        assert main(["run", str(path), "--out", str(tmp_path / "o")]) == 1
        assert not (tmp_path / "o").exists()

    def test_solver_failure_reports_time(self, tmp_path, capsys):
        path = write_config(tmp_path / "crash.json", K=0.0, h0=0.95, g0=40.0, n_cells=8, dt=1e-2,
                            t_final=1.0)
        out = tmp_path / "o"
        assert main(["run", path, "--out", str(out)]) == 2
        assert "at t=" in capsys.readouterr().err
        assert not out.exists()

    def test_usage_error_exit_code(self, capsys):
        assert main(["run"]) == 1
        assert main(["frobnicate"]) == 1


class TestConverge:
    def test_levels_too_few(self, equilibrium_json, tmp_path):
        assert main(["converge", equilibrium_json, "--levels", "2", "--out", str(tmp_path)]) == 1

    def test_equilibrium_degenerate(self, equilibrium_json, tmp_path, capsys):
        assert main(["converge", equilibrium_json, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "study.json").read_text())
        assert report["status"] == "DEGENERATE" and report["errors"] == [0.0, 0.0, 0.0]
        assert "DEGENERATE" in capsys.readouterr().out

    def test_mms_orders(self, tmp_path):
        from burgers_particle.control import MovingKinkForcing

        f = MovingKinkForcing()
        cfg = dict(K=1.0, n_cells=8, dt=1 / 64, t_final=0.5, scheme="crank_nicolson_picard",
                   forcing=f.to_dict(), **f.initial_fields())
        path = write_config(tmp_path / "mms.json", **cfg)
        assert main(["converge", path, "--mode", "space", "--jobs", "2",
                     "--out", str(tmp_path / "o")]) == 0
        report = json.loads((tmp_path / "o" / "study.json").read_text())
        assert report["target"] == "analytic" and report["observed_order"] >= 1.8
        rows = (tmp_path / "o" / "study.csv").read_text().splitlines()
        assert rows[0] == "level,n_cells,dt,error,order" and len(rows) == 4


class TestBounds:
    def test_zero_data(self, tmp_path):
        path = write_config(tmp_path / "z.json", K=0.0, h0=0.0, g0=0.0, v0="0")
        assert main(["bounds", path, "--t-max", "5", "--samples", "11", "--out", str(tmp_path)]) == 0
        header, data = read_csv(tmp_path / "bounds.csv")
        assert tuple(header) == BOUNDS_COLUMNS
        assert np.allclose(data[:, 4], 2 / 3) and np.allclose(data[:, 5], 2 / 3)

    def test_gain_makes_kappa_decrease(self, tmp_path):
        path = write_config(tmp_path / "k.json", K=1.0, h0=0.0, g0=0.0, v0="0")
        main(["bounds", path, "--t-max", "3", "--samples", "7", "--out", str(tmp_path)])
        _, data = read_csv(tmp_path / "bounds.csv")
        assert np.all(np.diff(data[:, 4]) < 0) and np.all(np.diff(data[:, 5]) < 0)

    def test_free_kappa_constant(self, tmp_path):
        path = write_config(tmp_path / "f.json", K=0.0, h0=0.3, g0=0.1, v0="sin(pi*y)")
        main(["bounds", path, "--out", str(tmp_path)])
        _, data = read_csv(tmp_path / "bounds.csv")
        assert np.all(data[:, 4] == data[0, 4])

    def test_config_error(self, tmp_path):
        path = write_config(tmp_path / "b.json", h0=1.5)
        assert main(["bounds", path, "--out", str(tmp_path)]) == 1


class TestVerify:
    def test_single_criterion(self, tmp_path, capsys):
        assert main(["verify", "--criteria", "10", "--out", str(tmp_path)]) == 0
        assert "[PASS] criterion 10" in capsys.readouterr().out
        report = json.loads((tmp_path / "verify.json").read_text())
        assert report["passed"] and report["checks"][0]["number"] == 10

    def test_unknown_criterion(self):
        assert main(["verify", "--criteria", "11"]) == 1


def test_console_script(tmp_path, equilibrium_json):
    proc = subprocess.run([sys.executable, "-m", "burgers_particle.cli", "bounds", equilibrium_json,
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "bounds.csv").exists()
