"""
Unit tests for mesh construction.
"""

import numpy as np
import pytest

from app.core.exceptions import MeshError, PreconditionError
from app.services import mesh_primitives as mp
from app.services.discrete_geometry import vertex_normals


class TestTopology:
    """Euler characteristic and boundary loops of every primitive."""

    @pytest.mark.parametrize(
        "mesh_factory, chi, loops",
        [
            (lambda: mp.icosphere(2), 2, 0),
            (lambda: mp.flat_disc(1.0, rings=6), 1, 1),
            (lambda: mp.hemisphere(1.0, rings=6), 1, 1),
            (lambda: mp.flat_annulus(0.5, 1.0, rings=4, segments=32), 0, 2),
            (lambda: mp.open_cylinder(1.0, 2.0, rings=8, segments=32), 0, 2),
            (lambda: mp.catenoid_slice(1.0, 1.0, rings=8, segments=32), 0, 2),
            (lambda: mp.sphere_with_holes(1.0, 0.5, holes=1, rings=8, segments=32), 1, 1),
            (lambda: mp.sphere_with_holes(1.0, 0.5, holes=2, rings=8, segments=32), 0, 2),
        ],
    )
    def test_euler_characteristic(self, mesh_factory, chi, loops):
        mesh = mesh_factory()

        assert mesh.euler_characteristic == chi
        assert len(mesh.boundary_loops) == loops

    def test_disc_boundary_points(self):
        mesh = mp.flat_disc(1.0, rings=4, boundary_points=50)

        assert len(mesh.boundary_loops[0]) == 50
        assert np.allclose(np.linalg.norm(mesh.vertices[mesh.boundary_loops[0]], axis=1), 1.0)

    def test_boundary_vertices_are_fixed(self):
        mesh = mp.flat_annulus(0.5, 1.0, rings=3, segments=16)

        assert mesh.fixed_mask.sum() == 32
        assert np.array_equal(mesh.fixed_mask, mesh.boundary_mask)


class TestOrientation:
    def test_flat_disc_points_up(self):
        normals = vertex_normals(mp.flat_disc(1.0, rings=5))

        assert np.all(normals[:, 2] > 0.99)

    def test_icosphere_points_outward(self):
        mesh = mp.icosphere(2, radius=2.0)
        normals = vertex_normals(mesh)

        assert np.all(np.einsum("ij,ij->i", normals, mesh.vertices) > 0)
        assert np.allclose(np.linalg.norm(mesh.vertices, axis=1), 2.0)

    def test_cylinder_points_away_from_axis(self):
        mesh = mp.open_cylinder(1.0, 2.0, rings=6, segments=24)
        normals = vertex_normals(mesh)
        radial = mesh.vertices.copy()
        radial[:, 2] = 0.0

        assert np.all(np.einsum("ij,ij->i", normals, radial) > 0)

    def test_revolve_follows_profile_normals(self):
        z = np.linspace(-0.5, 0.5, 9)
        r = np.ones_like(z)
        inward = np.column_stack([-np.ones_like(z), np.zeros_like(z)])
        mesh = mp.revolve_profile(r, z, 24, profile_normals=inward)
        normals = vertex_normals(mesh)
        radial = mesh.vertices.copy()
        radial[:, 2] = 0.0

        assert np.all(np.einsum("ij,ij->i", normals, radial) < 0)


class TestPreconditions:
    def test_annulus_radii_must_be_ordered(self):
        with pytest.raises(PreconditionError):
            mp.flat_annulus(1.0, 0.5)

    def test_cap_polar_angle_range(self):
        with pytest.raises(PreconditionError):
            mp.spherical_cap(1.0, np.pi)

    def test_cap_boundary_larger_than_sphere(self):
        with pytest.raises(PreconditionError):
            mp.cap_with_boundary_radius(2.0, -1.0)

    def test_sphere_with_three_holes(self):
        with pytest.raises(PreconditionError):
            mp.sphere_with_holes(1.0, 0.5, holes=3)

    def test_profile_touching_axis(self):
        with pytest.raises(MeshError):
            mp.revolve_profile(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 16)

    def test_stacked_rings_need_equal_counts(self):
        with pytest.raises(PreconditionError):
            mp.stacked_rings([np.zeros((4, 3)), np.zeros((5, 3))])

    def test_concentric_rings_need_a_ring(self):
        with pytest.raises(PreconditionError):
            mp.flat_disc(1.0, rings=0)


class TestStitching:
    def test_unequal_rings_cover_the_strip(self):
        inner = np.arange(0, 6)
        outer = np.arange(6, 18)
        faces = mp.stitch_rings(inner, outer)

        # a closed strip between rings of sizes m and n has m + n triangles
        assert len(faces) == 18
        assert set(np.unique(faces)) == set(range(18))

    def test_cap_has_requested_boundary_radius(self):
        mesh = mp.cap_with_boundary_radius(0.5, -1.0, rings=6, boundary_points=40)
        loop = mesh.boundary_loops[0]
        radii = np.linalg.norm(mesh.vertices[loop][:, :2], axis=1)

        assert np.allclose(radii, 0.5)
