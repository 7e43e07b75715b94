"""
Array-backed geometry value types.

These carry numpy arrays and are therefore plain dataclasses rather than
pydantic models. They are treated as immutable once built; services return
new instances instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from app.schemas.params import CurveParams, FirstIntegrals


@dataclass(frozen=True)
class ClosureDefects:
    """Closure defects over one curvature period."""

    delta_z: float
    delta_theta: float


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """
    One period of the curvature of a boundary elastica.

    Samples are uniform in arclength, ``n_samples + 1`` of them with
    ``s[0] = 0`` and ``s[-1] = period``. ``kappa_at`` evaluates the dense
    solution at any arclength.
    """

    params: CurveParams
    integrals: FirstIntegrals
    s: np.ndarray
    kappa: np.ndarray
    kappa_prime: np.ndarray
    period: float
    kappa_min: float
    kappa_max: float
    kappa_at: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    kappa_prime_at: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    oscillation: Any = field(default=None, repr=False)

    @property
    def kappa_samples(self) -> np.ndarray:
        """(s, kappa) pairs as an (n+1, 2) array."""
        return np.column_stack([self.s, self.kappa])

    @property
    def tau(self) -> np.ndarray:
        if self.integrals.e == 0:
            return np.zeros_like(self.kappa)
        return self.integrals.e / (4.0 * (self.kappa + self.params.mu) ** 2)


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Arc-length sampled space curve with its Frenet frame."""

    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    binormals: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    arclength_step: float
    closed: bool
    kappa_prime: Optional[np.ndarray] = None
    reconstruction_gap: Optional[float] = None

    @property
    def n_samples(self) -> int:
        return int(self.points.shape[0])

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.arclength_step

    @property
    def length(self) -> float:
        """Polyline length; closed curves omit the duplicated endpoint."""
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return float(seg.sum())

    @property
    def endpoint_gap(self) -> float:
        return float(np.linalg.norm(self.points[0] - self.points[-1]))

    def loop_points(self) -> np.ndarray:
        """Points without the duplicated closing sample."""
        if self.closed and self.n_samples > 1 and self.endpoint_gap < 1e-6 * max(self.length, 1.0):
            return self.points[:-1]
        return self.points

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "SampledCurve":
        return replace(
            self,
            points=self.points @ rotation.T + translation,
            tangents=self.tangents @ rotation.T,
            normals=self.normals @ rotation.T,
            binormals=self.binormals @ rotation.T,
        )

    def scaled(self, factor: float) -> "SampledCurve":
        kp = None if self.kappa_prime is None else self.kappa_prime / factor**2
        return replace(
            self,
            points=self.points * factor,
            kappa=self.kappa / factor,
            tau=self.tau / factor,
            kappa_prime=kp,
            arclength_step=self.arclength_step * factor,
        )


class DelaunayKind(str, Enum):
    PLANE = "Plane"
    CATENOID = "Catenoid"
    SPHERE = "Sphere"
    CYLINDER = "Cylinder"
    UNDULOID = "Unduloid"
    NODOID = "Nodoid"


@dataclass(frozen=True)
class GaussMapPath:
    """
    Path of the Gauss map (u, w) = (cos phi, sin phi) along a profile.

    A path is a monotone interval of the normal angle phi; its monotone
    u-segments tagged with sign(w) are given by ``segments``.
    """

    phi_start: float
    phi_end: float

    def segments(self) -> List[Tuple[float, float, int]]:
        """Monotone (u_start, u_end, sign(w)) pieces, split where u = +-1."""
        lo, hi = sorted((self.phi_start, self.phi_end))
        cuts = [lo]
        k = int(np.floor(lo / np.pi)) + 1
        while k * np.pi < hi:
            cuts.append(k * np.pi)
            k += 1
        cuts.append(hi)
        if self.phi_start > self.phi_end:
            cuts = cuts[::-1]
        out = []
        for p0, p1 in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (p0 + p1)
            out.append((float(np.cos(p0)), float(np.cos(p1)), int(np.sign(np.sin(mid)))))
        return out

    @property
    def total_turn(self) -> float:
        return abs(self.phi_end - self.phi_start)

    @property
    def total_curvature(self) -> float:
        """Signed area of the spherical image, 2 pi (w_end - w_start)."""
        return float(2.0 * np.pi * (np.sin(self.phi_end) - np.sin(self.phi_start)))


@dataclass(frozen=True, eq=False)
class DelaunayProfile:
    """Meridian of a Delaunay surface parameterized by the Gauss map."""

    H: float
    flux: float
    kind: DelaunayKind
    path: GaussMapPath
    phi: np.ndarray
    u: np.ndarray
    r: np.ndarray
    z: np.ndarray
    w: np.ndarray

    @property
    def profile_samples(self) -> np.ndarray:
        """(u, r, z, w) rows."""
        return np.column_stack([self.u, self.r, self.z, self.w])

    @property
    def flux_residual(self) -> float:
        """max |u r + H r^2 - flux| over the samples."""
        return float(np.max(np.abs(self.u * self.r + self.H * self.r**2 - self.flux)))


class NodoidLabel(str, Enum):
    N1 = "N1"
    N2 = "N2"
    N3 = "N3"
    N4 = "N4"
    SIGMA = "Sigma"


@dataclass(frozen=True, eq=False)
class NodoidDomain:
    profile: DelaunayProfile
    label: NodoidLabel
    epsilon: float = 0.0

    @property
    def u_path(self) -> List[Tuple[float, float, int]]:
        return self.profile.path.segments()

    @property
    def boundary_u(self) -> Tuple[float, float]:
        return float(self.profile.u[0]), float(self.profile.u[-1])

    @property
    def boundary_radii(self) -> Tuple[float, float]:
        return float(self.profile.r[0]), float(self.profile.r[-1])

    @property
    def total_curvature_analytic(self) -> float:
        return self.profile.path.total_curvature


@dataclass(frozen=True, eq=False)
class BoundaryFrame:
    """Darboux data sampled along one boundary loop."""

    vertex_indices: np.ndarray
    points: np.ndarray
    ds: np.ndarray
    T: np.ndarray
    n: np.ndarray
    nu: np.ndarray
    curvature_normal: np.ndarray
    binormal: np.ndarray
    kappa: np.ndarray
    kappa_g: np.ndarray
    kappa_n: np.ndarray
    tau: np.ndarray
    tau_g: np.ndarray
    theta: np.ndarray

    @property
    def length(self) -> float:
        return float(self.ds.sum())


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Indexed triangle mesh with oriented boundary loops."""

    vertices: np.ndarray
    faces: np.ndarray
    boundary_loops: Tuple[np.ndarray, ...] = ()
    fixed_mask: Optional[np.ndarray] = None

    @classmethod
    def from_arrays(
        cls,
        vertices: np.ndarray,
        faces: np.ndarray,
        fix_boundary: bool = True,
    ) -> "TriMesh":
        """Build a mesh, extracting boundary loops and fixing boundary vertices."""
        v = np.asarray(vertices, dtype=float)
        f = np.asarray(faces, dtype=np.int64)
        loops = extract_boundary_loops(f)
        mask = np.zeros(len(v), dtype=bool)
        if fix_boundary:
            for loop in loops:
                mask[loop] = True
        return cls(vertices=v, faces=f, boundary_loops=tuple(loops), fixed_mask=mask)

    def with_vertices(self, vertices: np.ndarray) -> "TriMesh":
        return replace(self, vertices=np.asarray(vertices, dtype=float))

    def with_faces(self, faces: np.ndarray) -> "TriMesh":
        return TriMesh.from_arrays(self.vertices, faces)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted per row."""
        e = np.vstack([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        for loop in self.boundary_loops:
            mask[loop] = True
        return mask

    @property
    def interior_mask(self) -> np.ndarray:
        used = np.zeros(self.n_vertices, dtype=bool)
        used[self.faces.ravel()] = True
        return used & ~self.boundary_mask

    @cached_property
    def euler_characteristic(self) -> int:
        used = np.unique(self.faces.ravel())
        return int(len(used) - len(self.edges) + self.n_faces)

    @cached_property
    def face_normals_unnormalized(self) -> np.ndarray:
        v = self.vertices
        f = self.faces
        return np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])

    @cached_property
    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals_unnormalized, axis=1)

    @cached_property
    def neighbors(self) -> List[np.ndarray]:
        """Vertex adjacency lists."""
        adj: List[set] = [set() for _ in range(self.n_vertices)]
        for i, j in self.edges:
            adj[i].add(int(j))
            adj[j].add(int(i))
        return [np.array(sorted(a), dtype=np.int64) for a in adj]

    def bounding_box_diagonal(self) -> float:
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def summary(self) -> Dict[str, Any]:
        return {
            "vertices": self.n_vertices,
            "faces": self.n_faces,
            "boundary_loops": len(self.boundary_loops),
            "euler_characteristic": self.euler_characteristic,
        }


def extract_boundary_loops(faces: np.ndarray) -> List[np.ndarray]:
    """
    Ordered boundary cycles, oriented as the faces traverse their boundary edges.

    A boundary edge is a directed face edge whose reverse does not occur.
    """
    directed = np.vstack([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    directed_set = {(int(a), int(b)) for a, b in directed}
    nxt: Dict[int, int] = {}
    for a, b in directed_set:
        if (b, a) not in directed_set:
            nxt[a] = b

    loops: List[np.ndarray] = []
    visited: set = set()
    for start in sorted(nxt):
        if start in visited:
            continue
        loop = [start]
        visited.add(start)
        cur = nxt[start]
        while cur != start:
            if cur in visited or cur not in nxt:
                break
            loop.append(cur)
            visited.add(cur)
            cur = nxt[cur]
        loops.append(np.array(loop, dtype=np.int64))
    return loops
