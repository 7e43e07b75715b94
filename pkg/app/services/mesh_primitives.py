"""
Mesh generation for the shapes the toolkit evaluates.

Shapes are built from concentric or stacked vertex rings that are stitched
into triangle strips. Every constructor returns a ``TriMesh`` whose face
orientation matches the requested normal field (outward for closed convex
surfaces, +z for planar pieces).
"""

import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

from app.core.exceptions import MeshError, PreconditionError
from app.schemas.geometry import TriMesh

logger = logging.getLogger(__name__)


def stitch_rings(
    ring_a: np.ndarray,
    ring_b: np.ndarray,
    param_a: Optional[np.ndarray] = None,
    param_b: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Triangulate the strip between two closed vertex rings.

    The rings may have different sizes; the walk advances whichever ring
    has the smaller next parameter. Parameters are fractions of a turn in
    [0, 1) and default to uniform spacing.

    Args:
        ring_a: Vertex indices of the first ring, in order.
        ring_b: Vertex indices of the second ring, same direction as ``ring_a``.
        param_a: Angular parameter of each vertex of ``ring_a``.
        param_b: Angular parameter of each vertex of ``ring_b``.

    Returns:
        (k, 3) array of faces ``(a_i, a_i+1, b_j)`` and ``(a_i, b_j+1, b_j)``.
    """
    na, nb = len(ring_a), len(ring_b)
    if param_a is None:
        param_a = np.arange(na) / na
    if param_b is None:
        param_b = np.arange(nb) / nb
    # unrolled parameters so that both walks start together
    ta = np.append(param_a, param_a[0] + 1.0)
    tb = np.append(param_b, param_b[0] + 1.0)
    shift = param_b[0] - param_a[0]
    if shift > 0.5:
        tb = tb - 1.0
    elif shift < -0.5:
        tb = tb + 1.0

    faces = []
    i = j = 0
    while i < na or j < nb:
        advance_a = j >= nb or (i < na and ta[i + 1] <= tb[j + 1])
        if advance_a:
            faces.append((ring_a[i % na], ring_a[(i + 1) % na], ring_b[j % nb]))
            i += 1
        else:
            faces.append((ring_a[i % na], ring_b[(j + 1) % nb], ring_b[j % nb]))
            j += 1
    return np.array(faces, dtype=np.int64)


def fan(center: int, ring: np.ndarray) -> np.ndarray:
    """Triangle fan from a single vertex to a closed ring, matching ``stitch_rings`` orientation."""
    nxt = np.roll(ring, -1)
    return np.column_stack([np.full(len(ring), center), nxt, ring]).astype(np.int64)


def orient_faces(
    vertices: np.ndarray,
    faces: np.ndarray,
    normal_field: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Flip all faces if their normals disagree on average with ``normal_field``."""
    v = vertices
    fn = np.cross(v[faces[:, 1]] - v[faces[:, 0]], v[faces[:, 2]] - v[faces[:, 0]])
    centroids = v[faces].mean(axis=1)
    agreement = float(np.sum(fn * normal_field(centroids)))
    if agreement < 0:
        return faces[:, ::-1].copy()
    return faces


def _build(
    vertices: np.ndarray,
    faces: np.ndarray,
    normal_field: Callable[[np.ndarray], np.ndarray],
    fix_boundary: bool = True,
) -> TriMesh:
    faces = orient_faces(vertices, faces, normal_field)
    return TriMesh.from_arrays(vertices, faces, fix_boundary=fix_boundary)


def _up(points: np.ndarray) -> np.ndarray:
    return np.tile([0.0, 0.0, 1.0], (len(points), 1))


def _radial(center: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    def field(points: np.ndarray) -> np.ndarray:
        return points - center

    return field


def _axial_outward(points: np.ndarray) -> np.ndarray:
    out = points.copy()
    out[:, 2] = 0.0
    return out


def horizontal_circle(radius: float, phi: np.ndarray, z: float = 0.0) -> np.ndarray:
    """Points (r cos phi, r sin phi, z)."""
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), np.full(len(phi), z)])


def concentric_rings(
    ring_count: int,
    embed: Callable[[np.ndarray, np.ndarray], np.ndarray],
    points_per_ring: int = 6,
    boundary_points: Optional[int] = None,
) -> tuple:
    """
    Vertices and faces of a disc-type patch built from rings around a pole.

    Ring k (1..ring_count) carries ``points_per_ring * k`` vertices, or
    ``boundary_points`` on the outermost ring when given. ``embed(rho, phi)``
    maps the radial fraction rho in [0, 1] and angle phi to 3D points.
    """
    if ring_count < 1:
        raise PreconditionError("ring count must be at least 1")
    vertices = [embed(np.array([0.0]), np.array([0.0]))]
    rings: List[np.ndarray] = [np.array([0], dtype=np.int64)]
    params: List[np.ndarray] = [np.array([0.0])]
    offset = 1
    for k in range(1, ring_count + 1):
        n_k = points_per_ring * k
        if k == ring_count and boundary_points is not None:
            n_k = boundary_points
        # stagger alternate rings for better triangle shape
        t = (np.arange(n_k) + 0.5 * (k % 2)) / n_k
        phi = 2.0 * np.pi * t
        rho = np.full(n_k, k / ring_count)
        vertices.append(embed(rho, phi))
        rings.append(np.arange(offset, offset + n_k, dtype=np.int64))
        params.append(t)
        offset += n_k

    faces = [fan(0, rings[1])]
    for k in range(1, ring_count):
        faces.append(stitch_rings(rings[k], rings[k + 1], params[k], params[k + 1]))
    return np.vstack(vertices), np.vstack(faces)


def stacked_rings(
    ring_points: Sequence[np.ndarray],
) -> tuple:
    """Vertices and faces of a tube through index-aligned rings of equal size."""
    rings = [np.asarray(r, dtype=float) for r in ring_points]
    n = len(rings[0])
    if any(len(r) != n for r in rings):
        raise PreconditionError("stacked rings must have equal sample counts")
    vertices = np.vstack(rings)
    faces = []
    for k in range(len(rings) - 1):
        a = np.arange(k * n, (k + 1) * n, dtype=np.int64)
        b = a + n
        faces.append(stitch_rings(a, b))
    return vertices, np.vstack(faces)


def icosphere(subdivisions: int = 3, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Closed sphere from a subdivided icosahedron, outward oriented."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ]
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    v = [np.array(p, dtype=float) / np.linalg.norm(p) for p in verts]
    f = faces
    for _ in range(subdivisions):
        cache = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                v.append(m / np.linalg.norm(m))
                cache[key] = len(v) - 1
            return cache[key]

        new_faces = []
        for a, b, c in f:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        f = new_faces

    c = np.asarray(center, dtype=float)
    vertices = np.array(v) * radius + c
    return _build(vertices, np.array(f, dtype=np.int64), _radial(c))


def flat_disc(
    radius: float = 1.0, rings: int = 16, boundary_points: Optional[int] = None
) -> TriMesh:
    """Planar disc in z = 0 with normal +z."""

    def embed(rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
        r = radius * rho
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), np.zeros_like(r)])

    v, f = concentric_rings(rings, embed, boundary_points=boundary_points)
    return _build(v, f, _up)


def flat_annulus(
    inner_radius: float,
    outer_radius: float,
    rings: int = 8,
    segments: int = 64,
) -> TriMesh:
    """Planar annulus in z = 0 with normal +z."""
    if not 0 < inner_radius < outer_radius:
        raise PreconditionError("annulus needs 0 < inner_radius < outer_radius")
    phi = 2.0 * np.pi * np.arange(segments) / segments
    radii = np.linspace(inner_radius, outer_radius, rings + 1)
    ring_points = [horizontal_circle(r, phi) for r in radii]
    v, f = stacked_rings(ring_points)
    return _build(v, f, _up)


def open_cylinder(
    radius: float = 1.0, height: float = 2.0, rings: int = 32, segments: int = 64
) -> TriMesh:
    """Open tube around the z axis with outward normal."""
    phi = 2.0 * np.pi * np.arange(segments) / segments
    ring_points = []
    for k, z in enumerate(np.linspace(-height / 2.0, height / 2.0, rings + 1)):
        shift = np.pi * (k % 2) / segments
        ring_points.append(horizontal_circle(radius, phi + shift, z))
    v, f = stacked_rings(ring_points)
    return _build(v, f, _axial_outward)


def spherical_cap(
    sphere_radius: float,
    polar_angle: float,
    rings: int = 16,
    boundary_points: Optional[int] = None,
    south: bool = False,
) -> TriMesh:
    """
    Cap of a sphere centred at the origin, outward normal.

    The cap spans polar angles [0, polar_angle] measured from the north pole,
    or from the south pole when ``south`` is set.
    """
    if not 0 < polar_angle < np.pi:
        raise PreconditionError("polar angle must lie in (0, pi)")
    sign = -1.0 if south else 1.0

    def embed(rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
        theta = polar_angle * rho
        return sphere_radius * np.column_stack(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), sign * np.cos(theta)]
        )

    v, f = concentric_rings(rings, embed, boundary_points=boundary_points)
    return _build(v, f, _radial(np.zeros(3)))


def hemisphere(
    radius: float = 1.0, rings: int = 16, boundary_points: Optional[int] = None
) -> TriMesh:
    return spherical_cap(radius, np.pi / 2.0, rings=rings, boundary_points=boundary_points)


def cap_with_boundary_radius(
    boundary_radius: float,
    mean_curvature: float,
    rings: int = 16,
    boundary_points: Optional[int] = None,
) -> TriMesh:
    """
    Spherical cap of mean curvature ``mean_curvature`` < 0 over a circle of given radius.

    The sphere radius is 1/|H|; the smaller cap is returned.
    """
    R = 1.0 / abs(mean_curvature)
    if boundary_radius > R:
        raise PreconditionError("boundary circle larger than the sphere")
    return spherical_cap(R, float(np.arcsin(boundary_radius / R)), rings, boundary_points)


def sphere_with_holes(
    sphere_radius: float,
    hole_radius: float,
    holes: int = 1,
    rings: int = 32,
    segments: int = 128,
) -> TriMesh:
    """
    Sphere with one or two antipodal round holes of the given boundary radius.

    One hole leaves a large cap around the south pole; two holes leave a
    band between the polar caps.
    """
    if not 0 < hole_radius < sphere_radius:
        raise PreconditionError("hole radius must lie in (0, sphere_radius)")
    theta_hole = float(np.arcsin(hole_radius / sphere_radius))
    if holes == 1:
        return spherical_cap(
            sphere_radius, np.pi - theta_hole, rings=rings, boundary_points=segments, south=True
        )
    if holes == 2:
        theta = np.linspace(theta_hole, np.pi - theta_hole, rings + 1)
        return revolve_profile(
            sphere_radius * np.sin(theta),
            sphere_radius * np.cos(theta),
            segments,
            normal_field=_radial(np.zeros(3)),
        )
    raise PreconditionError(f"sphere_with_holes supports 1 or 2 holes, got {holes}")


def revolve_profile(
    r: np.ndarray,
    z: np.ndarray,
    segments: int,
    normal_field: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    profile_normals: Optional[np.ndarray] = None,
) -> TriMesh:
    """
    Surface of revolution of the meridian (r, z) about the z axis.

    Orientation follows ``normal_field`` or, when given, the meridian normals
    ``profile_normals`` as (n_r, n_z) pairs per profile sample.

    Raises:
        MeshError: If the profile touches the axis.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(r <= 0):
        raise MeshError("revolved profile must stay off the axis")
    phi = 2.0 * np.pi * np.arange(segments) / segments
    ring_points = [horizontal_circle(ri, phi, zi) for ri, zi in zip(r, z)]
    v, f = stacked_rings(ring_points)

    if profile_normals is not None:
        pn = np.asarray(profile_normals, dtype=float)
        reference = np.vstack([horizontal_circle(nr, phi, nz) for nr, nz in pn])
        fn = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        agreement = float(np.sum(fn * reference[f].mean(axis=1)))
        if agreement < 0:
            f = f[:, ::-1].copy()
        return TriMesh.from_arrays(v, f)

    return _build(v, f, normal_field or _axial_outward)


def catenoid_slice(
    neck_radius: float,
    half_height: float,
    rings: int = 64,
    segments: int = 128,
) -> TriMesh:
    """Catenoid r = a cosh(z / a) between z = -h and z = h, outward normal."""
    z = np.linspace(-half_height, half_height, rings + 1)
    r = neck_radius * np.cosh(z / neck_radius)
    return revolve_profile(r, z, segments)
