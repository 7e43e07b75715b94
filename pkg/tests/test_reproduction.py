"""
Tests for the reproduction pipeline.

The full targets are marked slow; run them with ``pytest -m slow``.
"""

import json

import pytest

from app.core.exceptions import PipelineStageError, PreconditionError, TooCoarseLoopError
from app.services.artifacts import ArtifactWriter
from app.services.reproduction import (
    ReproductionService,
    is_monotone_decreasing,
    is_monotone_increasing,
    residual_row,
    stage,
)


@pytest.fixture
def reproduction(test_settings):
    return ReproductionService(test_settings)


@pytest.fixture
def writer(tmp_path, test_settings):
    return ArtifactWriter(tmp_path, test_settings)


class TestStage:
    def test_toolkit_error_names_stage(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with stage("disc_q3.flow"):
                raise TooCoarseLoopError("loop too short")

        assert exc_info.value.stage == "disc_q3.flow"
        assert "loop too short" in exc_info.value.detail

    def test_foreign_error_is_wrapped(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with stage("catenoid.mesh"):
                raise ZeroDivisionError("division by zero")

        assert isinstance(exc_info.value.__cause__, ZeroDivisionError)

    def test_clean_stage_passes_through(self):
        with stage("noop"):
            value = 1

        assert value == 1


class TestHelpers:
    def test_monotone(self):
        assert is_monotone_decreasing([4.0, 3.0, 3.0, 1.0])
        assert not is_monotone_decreasing([4.0, 5.0])
        assert is_monotone_increasing([1.0, 2.0, 2.0])
        assert not is_monotone_increasing([2.0, 1.0])

    def test_residual_row_is_absolute(self):
        assert residual_row("el1", 5e-3).passed
        assert not residual_row("el1", 2e-2).passed
        assert residual_row("gauss_bonnet", 1e-12, 1e-9).passed


class TestTargets:
    def test_unknown_target(self, reproduction, writer):
        with pytest.raises(PreconditionError):
            reproduction.run("fig9", writer)

    @pytest.mark.slow
    def test_infima_table(self, reproduction, writer, tmp_path):
        rows = reproduction.run("table", writer, resolution=96)

        assert {r.name for r in rows if r.name.endswith(".witness")} == {
            f"table{case}.witness"
            for case in ("(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)")
        }
        assert all(r.passed for r in rows if r.name.endswith(".monotone"))
        table = json.loads((tmp_path / "table.json").read_text())
        assert len(table) == 8

    @pytest.mark.slow
    def test_elastica_pair_is_flowed(self, reproduction, writer, tmp_path):
        rows = reproduction.run("fig2", writer, resolution=64)

        names = {r.name for r in rows}
        assert {"annulus_elastica.euler_characteristic", "annulus_elastica.max_H"} <= names
        assert {f"annulus_elastica.el{k}" for k in (1, 2, 3, 4)} <= names
        assert (tmp_path / "annulus_elastica.obj").exists()
        assert (tmp_path / "annulus_elastica_trace.csv").exists()

    @pytest.mark.slow
    def test_catenoid_part(self, reproduction, writer, tmp_path):
        rows = reproduction.run("fig4", writer, resolution=128)

        assert all(r.passed for r in rows), [r.name for r in rows if not r.passed]
        assert (tmp_path / "catenoid.obj").exists()

    @pytest.mark.slow
    def test_nodoid_domains(self, reproduction, writer):
        rows = reproduction.run("fig3", writer, resolution=256)

        by_name = {r.name: r for r in rows}
        assert by_name["instability.second_derivative"].passed
        for label in ("N1", "N2", "N3", "N4"):
            assert by_name[f"{label}.boundary_radius"].passed
