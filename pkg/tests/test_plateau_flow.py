"""
Tests for the fixed-boundary flow and the interior equilibrium check.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from app.core.exceptions import OpenCurveError, PreconditionError
from app.schemas.params import EnergyParams, FlowConfig, StepMode
from app.services import mesh_primitives as mp
from app.services.discrete_geometry import sample_closed_curve
from app.services.plateau_flow import deep_interior, min_edge_length


def circle_curve(radius: float = 1.0, z: float = 0.0, n: int = 32):
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.column_stack([radius * np.cos(t), radius * np.sin(t), np.full(n, z)])
    return sample_closed_curve(pts, n)


def bumped(mesh, height: float = 0.1):
    """Lift interior vertices onto a paraboloid cap over the unit circle."""
    v = mesh.vertices.copy()
    r2 = v[:, 0] ** 2 + v[:, 1] ** 2
    free = mesh.interior_mask
    v[free, 2] = height * (1.0 - r2[free])
    return mesh.with_vertices(v)


class TestSeedSurfaces:
    def test_disc_topology(self, plateau_service):
        mesh = plateau_service.initial_disc(circle_curve(), rings=4)

        assert mesh.euler_characteristic == 1
        assert len(mesh.boundary_loops) == 1
        assert len(mesh.boundary_loops[0]) == 32

    def test_disc_boundary_is_the_curve(self, plateau_service):
        curve = circle_curve()
        mesh = plateau_service.initial_disc(curve, rings=3)

        boundary = mesh.vertices[mesh.boundary_mask]
        assert np.allclose(np.sort(boundary[:, 0]), np.sort(curve.loop_points()[:, 0]))
        assert np.allclose(np.linalg.norm(boundary[:, :2], axis=1), 1.0, atol=1e-9)

    def test_disc_faces_follow_curve_orientation(self, plateau_service):
        mesh = plateau_service.initial_disc(circle_curve(), rings=3)

        assert np.all(mesh.face_normals_unnormalized[:, 2] > 0)

    def test_disc_needs_a_ring(self, plateau_service):
        with pytest.raises(PreconditionError):
            plateau_service.initial_disc(circle_curve(), rings=0)

    def test_disc_needs_closed_curve(self, plateau_service):
        open_curve = replace(circle_curve(), closed=False)

        with pytest.raises(OpenCurveError):
            plateau_service.initial_disc(open_curve, rings=2)

    def test_annulus_topology(self, plateau_service):
        mesh = plateau_service.initial_annulus(circle_curve(z=-0.5), circle_curve(z=0.5), rings=4)

        assert mesh.euler_characteristic == 0
        assert len(mesh.boundary_loops) == 2
        assert mesh.boundary_mask.sum() == 64

    def test_annulus_normals_point_away_from_axis(self, plateau_service):
        mesh = plateau_service.initial_annulus(circle_curve(z=-0.5), circle_curve(z=0.5), rings=4)

        centers = mesh.vertices[mesh.faces].mean(axis=1)
        radial = np.einsum("ij,ij->i", mesh.face_normals_unnormalized[:, :2], centers[:, :2])
        assert np.all(radial > 0)

    def test_annulus_sample_mismatch(self, plateau_service):
        with pytest.raises(PreconditionError):
            plateau_service.initial_annulus(circle_curve(n=32), circle_curve(z=1.0, n=24), rings=2)


class TestStepControl:
    def test_stable_step_from_min_edge(self, plateau_service):
        mesh = mp.flat_disc(1.0, rings=6)

        expected = 0.4 * min_edge_length(mesh) ** 2

        assert plateau_service.stable_time_step(mesh) == pytest.approx(expected)

    def test_explicit_step_above_bound_rejected(self, plateau_service):
        mesh = mp.flat_disc(1.0, rings=4)
        dt = 2.0 * plateau_service.stable_time_step(mesh)

        with pytest.raises(PreconditionError):
            plateau_service.run_flow(mesh, FlowConfig(time_step=dt, max_iters=5))

    def test_fixed_mask_must_match_boundary(self, plateau_service):
        mesh = mp.flat_disc(1.0, rings=4)
        loose = replace(mesh, fixed_mask=np.zeros(mesh.n_vertices, dtype=bool))

        with pytest.raises(PreconditionError):
            plateau_service.run_flow(loose, FlowConfig(max_iters=5))


class TestFlow:
    def test_flat_disc_is_already_converged(self, plateau_service):
        mesh = plateau_service.initial_disc(circle_curve(), rings=4)

        final, trace = plateau_service.run_flow(mesh, FlowConfig(max_iters=10))

        assert trace.converged
        assert trace.iterations == [0]
        assert np.array_equal(final.vertices, mesh.vertices)

    def test_bump_flattens_explicit(self, plateau_service):
        mesh = bumped(plateau_service.initial_disc(circle_curve(), rings=6))

        final, trace = plateau_service.run_flow(mesh, FlowConfig(max_iters=4000, h_tolerance=1e-3))

        assert trace.converged
        assert np.max(np.abs(final.vertices[:, 2])) < 1e-2
        assert trace.area[-1] < trace.area[0]

    def test_bump_flattens_semi_implicit(self, plateau_service):
        mesh = bumped(plateau_service.initial_disc(circle_curve(), rings=6))
        dt = 10.0 * plateau_service.stable_time_step(mesh)
        config = FlowConfig(
            time_step=dt, max_iters=2000, h_tolerance=1e-3, step_mode=StepMode.SEMI_IMPLICIT
        )

        final, trace = plateau_service.run_flow(mesh, config)

        assert trace.converged
        assert np.max(np.abs(final.vertices[:, 2])) < 1e-2

    def test_boundary_vertices_never_move(self, plateau_service):
        mesh = bumped(plateau_service.initial_disc(circle_curve(), rings=5))

        final, _ = plateau_service.run_flow(mesh, FlowConfig(max_iters=50, remesh_interval=10))

        fixed = mesh.boundary_mask
        assert np.array_equal(final.vertices[fixed], mesh.vertices[fixed])

    def test_trace_rows(self, plateau_service):
        mesh = bumped(plateau_service.initial_disc(circle_curve(), rings=4))

        _, trace = plateau_service.run_flow(mesh, FlowConfig(max_iters=5, h_tolerance=1e-12))

        rows = trace.rows()
        assert len(rows) == 5
        assert set(rows[0]) == {"iter", "maxH", "maxdisp", "area"}
        assert not trace.converged

    @pytest.mark.slow
    def test_coaxial_circles_flow_to_catenoid(self, plateau_service):
        half_height = 0.5
        neck = brentq(lambda a: a * math.cosh(half_height / a) - 1.0, 0.6, 1.0)
        mesh = plateau_service.initial_annulus(
            circle_curve(z=-half_height, n=48), circle_curve(z=half_height, n=48), rings=12
        )
        dt = 5.0 * plateau_service.stable_time_step(mesh)
        config = FlowConfig(
            time_step=dt, max_iters=3000, h_tolerance=1e-3, step_mode=StepMode.SEMI_IMPLICIT
        )

        final, _ = plateau_service.run_flow(mesh, config)

        waist = np.min(np.linalg.norm(final.vertices[:, :2], axis=1))
        assert waist == pytest.approx(neck, abs=5e-2)


class TestEquilibrium:
    def test_deep_interior_keeps_away_from_boundary(self):
        mesh = mp.flat_disc(1.0, rings=8)
        deep = deep_interior(mesh)

        assert deep.sum() > 0
        assert deep.sum() < mesh.interior_mask.sum()
        for i in np.flatnonzero(mesh.boundary_mask):
            assert not np.any(deep[mesh.neighbors[i]])

    def test_catenoid_is_in_equilibrium(self, plateau_service):
        neck = 1.0 / math.cosh(1.0)
        mesh = mp.catenoid_slice(neck, neck, rings=64, segments=128)
        params = EnergyParams(a=1.0, c0=0.0, b=0.0, alpha=1.0, beta=1.0)

        report = plateau_service.verify_equilibrium(mesh, params)

        assert report.el1 < 5e-2
        assert report.el4 < 5e-2
        assert report.interior_vertices_used > 0

    def test_cylinder_is_not_willmore(self, plateau_service):
        # H = -1/2 everywhere, so the cubic term 2 H^3 is left unbalanced
        mesh = mp.open_cylinder(1.0, height=2.0, rings=16, segments=64)
        params = EnergyParams(a=1.0, c0=0.0, b=0.0, alpha=1.0, beta=1.0)

        el1, used = plateau_service.interior_residual(mesh, params)

        assert used > 0
        assert el1 > 0.5

    def test_closed_mesh_uses_whole_surface(self, plateau_service):
        params = EnergyParams(a=1.0, c0=1.0, b=0.0, alpha=1.0, beta=1.0)
        el1, used = plateau_service.interior_residual(mp.icosphere(3), params)

        assert used == mp.icosphere(3).n_vertices
        assert np.isfinite(el1)
