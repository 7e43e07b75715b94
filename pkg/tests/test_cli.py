"""
Tests for the command-line entry point.
"""

import json
import math

import numpy as np
import pytest

from app.cli import build_parser, main
from app.core.exceptions import EXIT_USAGE
from app.services import mesh_primitives as mp
from app.services.artifacts import write_curve_csv, write_obj
from app.services.discrete_geometry import sample_closed_curve


def outdir(path):
    return ["--output-dir", str(path)]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParser:
    def test_commands(self):
        parser = build_parser()

        for command in ("bounds", "domains", "instability"):
            assert parser.parse_args([command]).command == command

    def test_lambda_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["find-curve", "--p", "1", "--q", "3"])

    def test_unknown_target(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["reproduce", "fig9"])


class TestBounds:
    def test_annulus_case(self, capsys, tmp_path):
        code, out, _ = run(capsys, "bounds", "--c0", "1", "--b", "-1", *outdir(tmp_path))

        payload = json.loads(out)
        assert code == 0
        assert payload["case"] == "(iii)"
        assert payload["topology"] == "Annulus"
        assert payload["bound"] == pytest.approx(4 * math.pi)
        assert payload["attained"] == "Minimum"

    def test_disc_topology(self, capsys):
        code, out, _ = run(capsys, "bounds", "--topology", "disc", "--b", "-1")

        assert code == 0
        assert json.loads(out)["case"] == "disc-(ii)"

    def test_common_convention_flips_sign(self, capsys):
        code, out, _ = run(capsys, "bounds", "--c0", "-2", "--b", "1", "--c0-convention", "common")

        assert code == 0
        assert json.loads(out)["case"] == "(i)"

    def test_negative_spontaneous_curvature_is_usage_error(self, capsys):
        code, out, err = run(capsys, "bounds", "--c0", "-1")

        assert code == EXIT_USAGE
        assert out == ""
        assert "error:" in err

    def test_sweep(self, capsys, tmp_path):
        sweep = tmp_path / "sweep.json"
        sweep.write_text(json.dumps({"c0": [0.0, -1.0], "b": [0.0, 1.0]}))

        code, out, _ = run(capsys, "bounds", "--sweep", str(sweep), "--output-dir", str(tmp_path))

        rows = json.loads(out)
        assert code == 0
        assert len(rows) == 4
        assert [r.get("error") for r in rows if r["c0"] < 0] == ["OUT_OF_SCOPE", "OUT_OF_SCOPE"]
        assert (tmp_path / "bounds_sweep.json").exists()

    def test_spec_file_overrides_flags(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"c0": 1.0, "b": 1.0}))

        code, out, _ = run(capsys, "bounds", "--spec", str(spec))

        assert code == 0
        assert json.loads(out)["case"] == "(i)"

    def test_missing_spec_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "bounds", "--spec", str(tmp_path / "missing.json"))

        assert code == EXIT_USAGE


class TestCurves:
    def test_non_coprime_winding(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "find-curve", "--lambda", "1", "--p", "2", "--q", "4", *outdir(tmp_path)
        )

        assert code == EXIT_USAGE
        assert "error:" in err

    @pytest.mark.slow
    def test_trefoil_like_curve(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "find-curve", "--lambda", "1", "--p", "1", "--q", "3", *outdir(tmp_path)
        )

        assert code == 0
        assert json.loads(out)["defects"]["dz"] < 1e-6
        assert (tmp_path / "curve_q3_p1.csv").exists()
        assert (tmp_path / "curve_q3_p1.obj").exists()


class TestSurfaces:
    def test_gen_delaunay_sphere(self, capsys, tmp_path):
        code, out, _ = run(
            capsys,
            "gen-delaunay",
            "--H", "-0.5",
            "--flux", "0",
            "--phi-start", "-1",
            "--phi-end", "1",
            "--samples", "64",
            "--segments", "32",
            "--output-dir", str(tmp_path),
        )  # fmt: skip

        payload = json.loads(out)
        assert code == 0
        assert payload["kind"] == "Sphere"
        assert payload["total_curvature"] == pytest.approx(4 * math.pi * math.sin(1.0))
        assert (tmp_path / "delaunay.obj").exists()
        assert (tmp_path / "delaunay_profile.csv").read_text().startswith("u,r,z,w")

    def test_instability(self, capsys):
        code, out, _ = run(capsys, "instability", "--c0", "1", "--b", "1")

        payload = json.loads(out)
        assert code == 0
        assert payload["analytic"] == pytest.approx(-4 * math.pi)
        assert payload["unstable_domains"] == ["N2", "N3"]

    def test_domains(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "domains", "--c0", "1", "--b", "1", "--segments", "48", *outdir(tmp_path)
        )

        reports = json.loads(out)
        assert code == 0
        assert len(reports) == 4
        assert {p.name for p in tmp_path.glob("N*.obj")} == {"N1.obj", "N2.obj", "N3.obj", "N4.obj"}

    def test_energy_of_flat_disc(self, capsys, tmp_path):
        path = write_obj(mp.flat_disc(1.0, rings=12, boundary_points=128), tmp_path / "disc.obj")

        code, out, _ = run(capsys, "energy", "--mesh", str(path), "--output-dir", str(tmp_path))

        assert code == 0
        assert json.loads(out)["total"] == pytest.approx(4 * math.pi, rel=2e-2)
        assert (tmp_path / "disc_energy.json").exists()

    def test_energy_missing_mesh(self, capsys, tmp_path):
        code, _, _ = run(capsys, "energy", "--mesh", str(tmp_path / "nope.obj"))

        assert code == EXIT_USAGE

    def test_flow_on_planar_circle(self, capsys, tmp_path):
        t = 2.0 * np.pi * np.arange(32) / 32
        curve = sample_closed_curve(np.column_stack([np.cos(t), np.sin(t), np.zeros(32)]), 32)
        csv = write_curve_csv(curve, tmp_path / "circle.csv")

        code, out, _ = run(
            capsys, "flow", "--curve", str(csv), "--rings", "3", "--max-iters", "5",
            *outdir(tmp_path),
        )

        summary = json.loads(out)
        assert code == 0
        assert summary["converged"] is True
        assert summary["euler_characteristic"] == 1
        assert "equilibrium" not in summary
        assert (tmp_path / "flow_final.obj").exists()
        assert (tmp_path / "flow_trace.csv").exists()
