"""Dispatch, exit codes, reports, manifests, and replay determinism."""
from __future__ import annotations

import json
import math

import pytest

from poincrep import __version__
from poincrep.cli import dispatch

SINGLE = "dim 4\nsimplex 0 1 2 3 4\n"


def run(capsys, *argv: str) -> tuple[int, str, str]:
    rc = dispatch(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestDispatchBasics:
    def test_su2_tensor_worked_example(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "orbit", "su2-tensor", "--j", "0.5", "--l", "0.5",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert out.strip() == "0 1"

    def test_unknown_subcommand_usage_error(self, capsys):
        rc, _, _ = run(capsys, "frobnicate")
        assert rc == 2

    def test_missing_required_flag_usage_error(self, capsys):
        rc, _, _ = run(capsys, "orbit", "su2-tensor", "--j", "0.5")
        assert rc == 2

    def test_computation_error_exit_one(self, capsys, tmp_path):
        # 0.3 is not a half-integer spin
        rc, _, err = run(
            capsys, "orbit", "su2-tensor", "--j", "0.3", "--l", "0.5",
            "--out-dir", str(tmp_path),
        )
        assert rc == 1
        assert "error" in err

    def test_report_and_manifest_written(self, capsys, tmp_path):
        out_dir = tmp_path / "nested" / "run"
        rc, _, _ = run(
            capsys, "orbit", "su2-tensor", "--j", "1", "--l", "1",
            "--out-dir", str(out_dir),
        )
        assert rc == 0
        report = (out_dir / "orbit-su2-tensor.csv").read_text()
        assert "spin,0.0" in report and "spin,2.0" in report
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == ["orbit", "su2-tensor"]
        assert manifest["version"] == __version__
        assert manifest["seed"] == 0
        assert manifest["wall_time_s"] >= 0
        assert manifest["report"] == "orbit-su2-tensor.csv"


class TestOrbitCommands:
    def test_sl2c_label(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "orbit", "sl2c-label", "--point", "2,0,0,1",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert out.startswith("TIMELIKE_FUTURE")
        assert f"{math.sqrt(3):.6f}"[:6] in out

    def test_sl2c_label_bad_point(self, capsys, tmp_path):
        rc, _, err = run(
            capsys, "orbit", "sl2c-label", "--point", "1,2,3",
            "--out-dir", str(tmp_path),
        )
        assert rc == 1
        assert "t,x1,x2,x3" in err

    def test_flux(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "orbit", "flux", "--j", "1", "--resolution", "4000",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert "converged True" in out
        report = (tmp_path / "orbit-flux.csv").read_text()
        assert "flux," in report


class TestRepCommands:
    def test_tensor(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "rep", "tensor", "--r1", "1", "--r2", "2",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert "discrete r=3" in out
        assert "continuum (3, inf)" in out

    def test_triangle_emits_fiber_samples(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "rep", "triangle", "--r1", "1", "--r2", "2", "--r", "4",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert "status generic dim 2" in out
        lines = (tmp_path / "rep-triangle.csv").read_text().splitlines()
        points = [l for l in lines if l.startswith("point,")]
        assert len(points) > 100
        # node index plus a 4-vector per sampled fiber point
        assert all(len(l.split(",")) == 6 for l in points)

    def test_quad(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "rep", "quad", "--edges", "1,1,1", "--total", "3.5",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert "feasible True" in out
        report = (tmp_path / "rep-quad.csv").read_text()
        assert "isotropy,TRIVIAL," in report

    def test_quad_bad_edges(self, capsys, tmp_path):
        rc, _, err = run(
            capsys, "rep", "quad", "--edges", "1,1", "--total", "3.5",
            "--out-dir", str(tmp_path),
        )
        assert rc == 1
        assert "three comma-separated" in err


class TestIntwCommands:
    def test_bridge(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "intw", "bridge", "--group", "SU2", "--h1", "U1", "--h2", "U1",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert out.strip() == "dim 2 intersection U1"

    def test_bridge_cyclic_meet(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "intw", "bridge", "--group", "SU2", "--h1", "Z6", "--h2", "Z4",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert "intersection Z2" in out

    def test_bridge_unknown_group(self, capsys, tmp_path):
        rc, _, err = run(
            capsys, "intw", "bridge", "--group", "SU3", "--h1", "U1", "--h2", "U1",
            "--out-dir", str(tmp_path),
        )
        assert rc == 1
        assert "unknown group" in err

    def test_cocycle_dim(self, capsys, tmp_path):
        rc, out, _ = run(
            capsys, "intw", "cocycle-dim", "--irrep", "E_1",
            "--out-dir", str(tmp_path),
        )
        assert rc == 0
        assert out.strip() == "1"


class TestStatesumCommands:
    @pytest.fixture
    def complex_file(self, tmp_path):
        p = tmp_path / "single.tri"
        p.write_text(SINGLE)
        return p

    def test_eval_grid(self, capsys, tmp_path, complex_file):
        cfg = tmp_path / "grid.cfg"
        cfg.write_text("resolution = 4\n")
        rc, out, _ = run(
            capsys, "statesum", "eval", "--complex", str(complex_file),
            "--config", str(cfg), "--out-dir", str(tmp_path / "run"),
        )
        assert rc == 0
        assert out.startswith("Z ")
        report = (tmp_path / "run" / "statesum-eval.csv").read_text()
        assert "Z,6.549840669833884e-09" in report
        assert "backend," in report

    def test_eval_with_labels(self, capsys, tmp_path, complex_file):
        import poincrep.statesum as ss

        t = ss.load_triangulation(SINGLE)
        lab = ss.causal_chain_labelling(t, seed=2)
        labels = tmp_path / "chain.lab"
        labels.write_text(
            "\n".join(
                f"edge {a} {b} rho {lab.edge_colors[(a, b)]!r}" for a, b in t.edges
            )
        )
        rc, _, _ = run(
            capsys, "statesum", "eval", "--complex", str(complex_file),
            "--labels", str(labels), "--out-dir", str(tmp_path / "run"),
        )
        assert rc == 0
        report = (tmp_path / "run" / "statesum-eval.csv").read_text()
        assert "labelling_admissible,True" in report
        assert "labelled_trace_plus," in report

    def test_eval_parse_error_exit_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.tri"
        bad.write_text("dim 4\nsimplex 0 1 2 2 4\n")
        rc, _, err = run(
            capsys, "statesum", "eval", "--complex", str(bad),
            "--out-dir", str(tmp_path / "run"),
        )
        assert rc == 1
        assert "line 2" in err

    def test_sphericity_with_sweep(self, capsys, tmp_path, complex_file):
        rc, out, _ = run(
            capsys, "statesum", "sphericity", "--complex", str(complex_file),
            "--trials", "5", "--sweep", "--out-dir", str(tmp_path / "run"),
        )
        assert rc == 0
        assert "max_residual" in out
        report = (tmp_path / "run" / "statesum-sphericity.csv").read_text()
        assert report.count("sweep_residual,") == 4


class TestReplay:
    def test_grid_replay_is_byte_identical(self, capsys, tmp_path):
        complex_file = tmp_path / "single.tri"
        complex_file.write_text(SINGLE)
        cfg = tmp_path / "grid.cfg"
        cfg.write_text("resolution = 4\n")
        first = tmp_path / "first"
        rc, _, _ = run(
            capsys, "statesum", "eval", "--complex", str(complex_file),
            "--config", str(cfg), "--out-dir", str(first),
        )
        assert rc == 0
        second = tmp_path / "second"
        rc, _, _ = run(
            capsys, "replay", "--manifest", str(first / "manifest.json"),
            "--out-dir", str(second),
        )
        assert rc == 0
        a = (first / "statesum-eval.csv").read_bytes()
        b = (second / "statesum-eval.csv").read_bytes()
        assert a == b

    def test_quadrature_replay_is_byte_identical(self, capsys, tmp_path):
        first = tmp_path / "first"
        rc, _, _ = run(
            capsys, "orbit", "flux", "--j", "0.5", "--resolution", "3000",
            "--out-dir", str(first),
        )
        assert rc == 0
        second = tmp_path / "second"
        rc, _, _ = run(
            capsys, "replay", "--manifest", str(first / "manifest.json"),
            "--out-dir", str(second),
        )
        assert rc == 0
        assert (first / "orbit-flux.csv").read_bytes() == (
            second / "orbit-flux.csv"
        ).read_bytes()

    def test_missing_manifest_exit_one(self, capsys, tmp_path):
        rc, _, err = run(
            capsys, "replay", "--manifest", str(tmp_path / "nope.json"),
        )
        assert rc == 1
        assert "error" in err
