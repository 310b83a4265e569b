"""Tests for the config-driven command line runner."""

import json
import math

import pytest

from gbbm.cli import main


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def simulate_config(tmp_path, **overrides):
    cfg = {
        "command": "simulate",
        "seed": 1,
        "domain": {"K": 16, "pad_factor": 3.0},
        "solver": {"p": 3, "s": 0.5, "dt": 0.01},
        "params": {
            "T": 0.2,
            "initial": {"kind": "modes", "modes": [[1, 0.1, 0.0]]},
        },
    }
    cfg.update(overrides)
    return write_config(tmp_path, cfg)


class TestValidate:
    def test_valid_config(self, tmp_path, capsys):
        path = simulate_config(tmp_path)
        assert main(["validate", path]) == 0
        assert "ok" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.json")]) == 2
        assert "not found" in capsys.readouterr().err

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == 2

    def test_unknown_command(self, tmp_path):
        path = write_config(tmp_path, {"command": "frobnicate", "seed": 1})
        assert main(["validate", path]) == 2

    def test_k_too_small_for_sweep(self, tmp_path, capsys):
        cfg = {
            "command": "sweep-multilinear",
            "seed": 1,
            "domain": {"K": 8, "pad_factor": 2.0},
            "solver": {"p": 3, "s": 0.0},
            "params": {"N_list": [16]},
        }
        path = write_config(tmp_path, cfg)
        assert main(["validate", path]) == 1
        assert "infeasible" in capsys.readouterr().out

    def test_pad_too_small(self, tmp_path, capsys):
        path = simulate_config(tmp_path, domain={"K": 16, "pad_factor": 2.0})
        assert main(["validate", path]) == 1
        assert "AliasError" in capsys.readouterr().out

    def test_illposed_time_window(self, tmp_path):
        cfg = {
            "command": "illposed",
            "seed": 1,
            "solver": {"p": 3, "s": 0.0},
            "params": {"N_list": [8], "t": 2.0},
        }
        path = write_config(tmp_path, cfg)
        assert main(["validate", path]) == 1


class TestRun:
    def test_simulate_writes_artifacts(self, tmp_path):
        path = simulate_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", path, "--output-dir", str(out)]) == 0
        assert (out / "manifest.json").is_file()
        csv = (out / "trajectory.csv").read_text().splitlines()
        assert csv[0] == "t,energy,hamiltonian,hs_norm,h1_norm"
        assert len(csv) > 2

    def test_manifest_contents(self, tmp_path):
        path = simulate_config(tmp_path)
        out = tmp_path / "out"
        main(["run", path, "--output-dir", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["command"] == "simulate"
        assert "tool_version" in manifest
        assert manifest["wall_time_s"] >= 0

    def test_missing_config_exit_2(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.json")]) == 2
        assert capsys.readouterr().err

    def test_conservation_zero_data(self, tmp_path):
        cfg = {
            "command": "conservation",
            "seed": 1,
            "domain": {"K": 8, "pad_factor": 3.0},
            "solver": {"p": 3, "dt": 0.05},
            "params": {"T": 0.2, "initial": {"kind": "zero"}},
        }
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["run", path, "--output-dir", str(out)]) == 0
        rows = (out / "trajectory.csv").read_text().splitlines()[1:]
        for row in rows:
            t, e, m, hs, h1 = (float(v) for v in row.split(","))
            assert e == 0.0 and m == 0.0 and hs == 0.0 and h1 == 0.0

    def test_sweep_artifacts(self, tmp_path):
        cfg = {
            "command": "sweep-multilinear",
            "seed": 1,
            "domain": {"K": 64, "pad_factor": 2.0},
            "solver": {"p": 3},
            "params": {"N_list": [4, 8, 16], "s_list": [0.0]},
        }
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["run", path, "--output-dir", str(out)]) == 0
        csv = (out / "sweep_p3_s0.csv").read_text().splitlines()
        assert csv[0] == "N,p,s,lhs,rhs,ratio,gamma_expected,fitted_slope"
        # three data rows plus the aggregate row
        assert len(csv) == 5

    def test_threads_match_serial(self, tmp_path):
        cfg = {
            "command": "sweep-multilinear",
            "seed": 1,
            "domain": {"K": 64, "pad_factor": 2.0},
            "solver": {"p": 3},
            "params": {"N_list": [4, 8, 16], "s_list": [0.0]},
        }
        path = write_config(tmp_path, cfg)
        out1, out2 = tmp_path / "serial", tmp_path / "parallel"
        assert main(["run", path, "--output-dir", str(out1)]) == 0
        assert main(["run", path, "--output-dir", str(out2), "--threads", "3"]) == 0
        assert (out1 / "sweep_p3_s0.csv").read_text() == (out2 / "sweep_p3_s0.csv").read_text()

    def test_determinism(self, tmp_path):
        cfg = {
            "command": "simulate",
            "seed": 42,
            "domain": {"K": 32, "pad_factor": 3.0},
            "solver": {"p": 3, "s": 0.25, "dt": 0.01},
            "params": {"T": 0.1, "initial": {"kind": "rough", "s": 0.25}},
        }
        path = write_config(tmp_path, cfg)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", path, "--output-dir", str(out1)]) == 0
        assert main(["run", path, "--output-dir", str(out2)]) == 0
        assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()
