"""
Discrete geometry service.

Curvature estimators on triangle meshes:
- Mean curvature from the cotangent Laplacian over mixed (Voronoi) areas
- Gaussian curvature from angle defects
- Boundary Darboux frames with geodesic curvature from the turning of the
  boundary polygon, so that Gauss-Bonnet holds exactly for the discrete pair

Sign conventions: the surface normal follows the face orientation and the
mean curvature of the unit sphere with outward normal is -1. The geodesic
curvature carries the sign that makes int K = oint kappa_g + 2 pi chi; the
boundary of a flat unit disc has kappa_g = -1.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.interpolate import CubicSpline

from app.core.exceptions import (
    MeshError,
    OpenCurveError,
    TooCoarseLoopError,
    ZeroAreaStarError,
)
from app.interfaces.discrete_geometry import IDiscreteGeometryService
from app.schemas.geometry import BoundaryFrame, SampledCurve, TriMesh
from app.schemas.params import EnergyParams
from app.schemas.reports import SurfaceIntegrals, WirtingerReport

logger = logging.getLogger(__name__)

MIN_LOOP_VERTICES = 8


def corner_angles(mesh: TriMesh) -> np.ndarray:
    """Interior angles (n_faces, 3); column k is the angle at faces[:, k]."""
    v = mesh.vertices
    f = mesh.faces
    angles = np.empty(f.shape, dtype=float)
    for k in range(3):
        p = v[f[:, k]]
        a = v[f[:, (k + 1) % 3]] - p
        b = v[f[:, (k + 2) % 3]] - p
        cross = np.linalg.norm(np.cross(a, b), axis=1)
        angles[:, k] = np.arctan2(cross, np.einsum("ij,ij->i", a, b))
    return angles


def cotangent_laplacian(mesh: TriMesh) -> sparse.csr_matrix:
    """
    Cotangent weight matrix W with (W x)_i = sum_j w_ij (x_j - x_i).

    w_ij = (cot alpha_ij + cot beta_ij) / 2 over the two opposite corners.
    """
    f = mesh.faces
    ang = corner_angles(mesh)
    with np.errstate(divide="ignore"):
        cot = 1.0 / np.tan(ang)
    rows, cols, vals = [], [], []
    for k in range(3):
        i = f[:, (k + 1) % 3]
        j = f[:, (k + 2) % 3]
        w = 0.5 * cot[:, k]
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    rows_a = np.concatenate(rows)
    cols_a = np.concatenate(cols)
    vals_a = np.concatenate(vals)
    n = mesh.n_vertices
    W = sparse.csr_matrix((vals_a, (rows_a, cols_a)), shape=(n, n))
    diag = np.asarray(W.sum(axis=1)).ravel()
    return (W - sparse.diags(diag)).tocsr()


def mixed_areas(mesh: TriMesh) -> np.ndarray:
    """Mixed Voronoi areas per vertex; they sum to the total surface area."""
    v = mesh.vertices
    f = mesh.faces
    ang = corner_angles(mesh)
    area = mesh.face_areas
    out = np.zeros(mesh.n_vertices)
    obtuse = ang > np.pi / 2
    any_obtuse = obtuse.any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = 1.0 / np.tan(ang)
    for k in range(3):
        i = f[:, k]
        j = f[:, (k + 1) % 3]
        m = f[:, (k + 2) % 3]
        eij = np.sum((v[j] - v[i]) ** 2, axis=1)
        eim = np.sum((v[m] - v[i]) ** 2, axis=1)
        voronoi = 0.125 * (eij * cot[:, (k + 2) % 3] + eim * cot[:, (k + 1) % 3])
        contrib = np.where(
            any_obtuse,
            np.where(obtuse[:, k], 0.5 * area, 0.25 * area),
            voronoi,
        )
        np.add.at(out, i, contrib)
    return out


def vertex_normals(mesh: TriMesh) -> np.ndarray:
    """Angle-weighted unit vertex normals oriented by the faces."""
    fn = mesh.face_normals_unnormalized
    norms = np.linalg.norm(fn, axis=1, keepdims=True)
    unit = np.divide(fn, norms, out=np.zeros_like(fn), where=norms > 0)
    ang = corner_angles(mesh)
    out = np.zeros_like(mesh.vertices)
    for k in range(3):
        np.add.at(out, mesh.faces[:, k], unit * ang[:, k : k + 1])
    n = np.linalg.norm(out, axis=1, keepdims=True)
    return np.divide(out, n, out=np.zeros_like(out), where=n > 0)


def validate_mesh(mesh: TriMesh) -> None:
    """Check manifold edges, non-degenerate faces and consistent orientation."""
    f = mesh.faces
    directed = np.vstack([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    undirected = np.sort(directed, axis=1)
    _, counts = np.unique(undirected, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("edge shared by more than two faces")
    _, dcounts = np.unique(directed, axis=0, return_counts=True)
    if np.any(dcounts > 1):
        raise MeshError("inconsistent face orientation")
    area = mesh.face_areas
    if np.any(area <= 1e-14 * area.mean()):
        raise MeshError("degenerate face")


def _periodic_central_difference(values: np.ndarray, ds: np.ndarray) -> np.ndarray:
    """d/ds on a closed loop with nonuniform spacing; ds[i] is the edge i -> i+1."""
    fwd = np.roll(values, -1, axis=0) - values
    bwd = values - np.roll(values, 1, axis=0)
    h_f = ds
    h_b = np.roll(ds, 1)
    if values.ndim > 1:
        h_f = h_f[:, None]
        h_b = h_b[:, None]
    return (fwd * h_b / h_f + bwd * h_f / h_b) / (h_f + h_b)


def circumcircle_curvature(prev: np.ndarray, cur: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Curvature vectors through three consecutive points; exact on circles."""
    u = prev - cur
    v = nxt - cur
    w = np.cross(u, v)
    w2 = np.sum(w * w, axis=1)
    uu = np.sum(u * u, axis=1)
    vv = np.sum(v * v, axis=1)
    offset = (uu[:, None] * np.cross(v, w) + vv[:, None] * np.cross(w, u)) / (
        2.0 * np.where(w2 > 0, w2, 1.0)[:, None]
    )
    r2 = np.sum(offset * offset, axis=1)
    k = np.where((w2 > 0)[:, None], offset / np.where(r2 > 0, r2, 1.0)[:, None], 0.0)
    return k


class DiscreteGeometryService(IDiscreteGeometryService):
    """Read-only estimators over an immutable mesh snapshot."""

    def vertex_mean_curvature(self, mesh: TriMesh) -> np.ndarray:
        """
        Per-vertex mean curvature.

        Args:
            mesh: Oriented triangle mesh.

        Returns:
            Array of H; boundary vertices are NaN.

        Raises:
            ZeroAreaStarError: If an interior vertex has a zero-area star.
        """
        W = cotangent_laplacian(mesh)
        A = mixed_areas(mesh)
        interior = mesh.interior_mask
        if np.any(A[interior] <= 0):
            raise ZeroAreaStarError(
                f"{int(np.sum(A[interior] <= 0))} interior vertices have zero-area stars"
            )
        lap = W @ mesh.vertices
        nu = vertex_normals(mesh)
        H = np.full(mesh.n_vertices, np.nan)
        H[interior] = 0.5 * np.einsum("ij,ij->i", lap[interior], nu[interior]) / A[interior]
        return H

    def vertex_gaussian_curvature(self, mesh: TriMesh) -> np.ndarray:
        """Angle defects: 2 pi - sum on interior vertices, pi - sum on boundary vertices."""
        ang = corner_angles(mesh)
        sums = np.zeros(mesh.n_vertices)
        for k in range(3):
            np.add.at(sums, mesh.faces[:, k], ang[:, k])
        used = np.zeros(mesh.n_vertices, dtype=bool)
        used[mesh.faces.ravel()] = True
        defects = np.where(mesh.boundary_mask, np.pi - sums, 2.0 * np.pi - sums)
        return np.where(used, defects, 0.0)

    def boundary_rings(self, mesh: TriMesh, vertex: int) -> Tuple[np.ndarray, np.ndarray]:
        """First and second interior neighbor rings of a boundary vertex."""
        interior = mesh.interior_mask
        nb = mesh.neighbors
        ring1 = np.array([j for j in nb[vertex] if interior[j]], dtype=np.int64)
        seen = set(ring1.tolist()) | {int(vertex)}
        ring2 = sorted(
            {int(k) for j in ring1 for k in nb[j] if interior[k] and int(k) not in seen}
        )
        return ring1, np.array(ring2, dtype=np.int64)

    def _extrapolate_to_boundary(
        self, mesh: TriMesh, values: np.ndarray, vertex: int
    ) -> Tuple[float, float]:
        """
        Linear one-sided extrapolation of an interior field to a boundary vertex.

        Returns the extrapolated value and the slope along the outward
        distance from the vertex (positive slope: field grows toward the boundary).
        """
        ring1, ring2 = self.boundary_rings(mesh, vertex)
        x0 = mesh.vertices[vertex]
        if len(ring1) == 0:
            return float("nan"), 0.0
        f1 = float(np.mean(values[ring1]))
        d1 = float(np.mean(np.linalg.norm(mesh.vertices[ring1] - x0, axis=1)))
        if len(ring2) == 0:
            return f1, 0.0
        f2 = float(np.mean(values[ring2]))
        d2 = float(np.mean(np.linalg.norm(mesh.vertices[ring2] - x0, axis=1)))
        if d2 - d1 <= 1e-12 * max(d1, 1.0):
            return f1, 0.0
        slope = (f1 - f2) / (d2 - d1)
        return f1 + slope * d1, slope

    def boundary_mean_curvature(
        self, mesh: TriMesh, H: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """H with boundary vertices filled by extrapolation from the two interior rings."""
        if H is None:
            H = self.vertex_mean_curvature(mesh)
        out = H.copy()
        fallback = float(np.nanmean(H)) if np.any(np.isfinite(H)) else 0.0
        for loop in mesh.boundary_loops:
            for b in loop:
                val, _ = self._extrapolate_to_boundary(mesh, H, int(b))
                out[b] = val if np.isfinite(val) else fallback
        return out

    def conormal_derivative(
        self, mesh: TriMesh, values: np.ndarray, loop: np.ndarray
    ) -> np.ndarray:
        """Outward conormal derivative of an interior field at each loop vertex."""
        return np.array([self._extrapolate_to_boundary(mesh, values, int(b))[1] for b in loop])

    def boundary_darboux(self, mesh: TriMesh, loop: np.ndarray) -> BoundaryFrame:
        """
        Darboux frame {n, T, nu} with n = T x nu along a boundary loop.

        Raises:
            TooCoarseLoopError: If the loop has fewer than 8 vertices.
        """
        loop = np.asarray(loop, dtype=np.int64)
        if len(loop) < MIN_LOOP_VERTICES:
            raise TooCoarseLoopError(
                f"Boundary loop has {len(loop)} vertices, need at least {MIN_LOOP_VERTICES}"
            )

        P = mesh.vertices[loop]
        prev = np.roll(P, 1, axis=0)
        nxt = np.roll(P, -1, axis=0)
        edge = np.linalg.norm(nxt - P, axis=1)
        ds = 0.5 * (edge + np.roll(edge, 1))

        chord = nxt - prev
        T = chord / np.linalg.norm(chord, axis=1, keepdims=True)
        k = circumcircle_curvature(prev, P, nxt)
        k = k - np.sum(k * T, axis=1, keepdims=True) * T
        kappa = np.linalg.norm(k, axis=1)

        vn = vertex_normals(mesh)
        nu = np.empty_like(P)
        interior = mesh.interior_mask
        nb = mesh.neighbors
        for idx, b in enumerate(loop):
            inner = [j for j in nb[b] if interior[j]]
            if inner:
                # face normals at b sit about half a ring inside the boundary
                nu[idx] = 2.0 * vn[b] - vn[inner].mean(axis=0)
            else:
                nu[idx] = vn[b]
        nu = nu - np.sum(nu * T, axis=1, keepdims=True) * T
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        n = np.cross(T, nu)

        kappa_g = np.sum(k * n, axis=1)
        kappa_n = np.sum(k * nu, axis=1)
        theta = np.unwrap(np.arctan2(kappa_g, kappa_n))

        safe = kappa > 1e-12
        N = np.where(safe[:, None], k / np.where(safe, kappa, 1.0)[:, None], 0.0)
        B = np.cross(T, N)
        dB = _periodic_central_difference(B, edge)
        tau = np.where(safe, -np.sum(dB * N, axis=1), 0.0)

        dtheta = _periodic_central_difference(np.exp(1j * theta), edge)
        dtheta = np.imag(dtheta * np.exp(-1j * theta))
        tau_g = dtheta - tau

        return BoundaryFrame(
            vertex_indices=loop,
            points=P,
            ds=ds,
            T=T,
            n=n,
            nu=nu,
            curvature_normal=N,
            binormal=B,
            kappa=kappa,
            kappa_g=kappa_g,
            kappa_n=kappa_n,
            tau=tau,
            tau_g=tau_g,
            theta=theta,
        )

    def boundary_gauss_curvature(self, frame: BoundaryFrame, H_boundary: np.ndarray) -> np.ndarray:
        """K = kappa_n (2H - kappa_n) - tau_g^2 along the boundary."""
        return frame.kappa_n * (2.0 * H_boundary - frame.kappa_n) - frame.tau_g**2

    def integrate_surface(self, mesh: TriMesh, params: EnergyParams) -> SurfaceIntegrals:
        """
        Surface integrals entering the energy.

        H-terms use mixed areas with boundary H extrapolated from the interior.
        K uses interior angle defects; boundary defects belong to oint kappa_g,
        so the boundary half-stars receive the extrapolated interior density.
        """
        A = mixed_areas(mesh)
        interior = mesh.interior_mask
        if mesh.boundary_loops:
            H = self.boundary_mean_curvature(mesh)
        else:
            H = self.vertex_mean_curvature(mesh)
        H = np.where(np.isfinite(H), H, 0.0)
        used = interior | mesh.boundary_mask
        weights = np.where(used, A, 0.0)
        shifted = H + params.c0
        return SurfaceIntegrals(
            area=float(mesh.face_areas.sum()),
            total_H_plus_c0_sq=float(np.sum(weights * shifted**2)),
            total_K=self.total_gaussian_curvature(mesh, A),
            total_H_offset=float(np.sum(weights * shifted)),
        )

    def gaussian_curvature_density(
        self, mesh: TriMesh, areas: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """Pointwise K: defect over mixed area inside, extrapolated on the boundary."""
        A = mixed_areas(mesh) if areas is None else areas
        interior = mesh.interior_mask
        defects = self.vertex_gaussian_curvature(mesh)
        K = np.full(mesh.n_vertices, np.nan)
        K[interior] = defects[interior] / A[interior]
        for loop in mesh.boundary_loops:
            for b in loop:
                val, _ = self._extrapolate_to_boundary(mesh, K, int(b))
                K[b] = val if np.isfinite(val) else 0.0
        return K

    def total_gaussian_curvature(self, mesh: TriMesh, areas: Optional[np.ndarray] = None) -> float:
        """Interior angle defects plus the boundary half-star share of int K."""
        A = mixed_areas(mesh) if areas is None else areas
        defects = self.vertex_gaussian_curvature(mesh)
        total = float(defects[mesh.interior_mask].sum())
        if mesh.boundary_loops:
            K = self.gaussian_curvature_density(mesh, A)
            b = mesh.boundary_mask
            total += float(np.sum(K[b] * A[b]))
        return total

    def total_geodesic_curvature(
        self, mesh: TriMesh, loops: Optional[Sequence[np.ndarray]] = None
    ) -> float:
        """oint kappa_g as the summed turning of the boundary polygons."""
        loops = mesh.boundary_loops if loops is None else loops
        defects = self.vertex_gaussian_curvature(mesh)
        return float(-sum(defects[np.asarray(loop)].sum() for loop in loops))

    def gauss_bonnet_residual(
        self, mesh: TriMesh, loops: Optional[Sequence[np.ndarray]] = None
    ) -> float:
        loops = mesh.boundary_loops if loops is None else loops
        defects = self.vertex_gaussian_curvature(mesh)
        on_loop = np.zeros(mesh.n_vertices, dtype=bool)
        for loop in loops:
            on_loop[np.asarray(loop)] = True
        used = np.zeros(mesh.n_vertices, dtype=bool)
        used[mesh.faces.ravel()] = True
        total_K = float(defects[used & ~on_loop].sum())
        kappa_g = self.total_geodesic_curvature(mesh, loops)
        chi = mesh.euler_characteristic
        return abs(total_K - kappa_g - 2.0 * np.pi * chi)

    def wirtinger_check(self, curve: SampledCurve) -> WirtingerReport:
        if not curve.closed:
            raise OpenCurveError("Wirtinger check needs a closed curve")
        pts = curve.loop_points()
        m = len(pts)
        L = float(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum())
        rhs = float(np.sum(curve.kappa[:m] ** 2) * curve.arclength_step)
        return WirtingerReport(lhs=4.0 * np.pi**2 / L, rhs=rhs)


def sample_closed_curve(points: np.ndarray, n_samples: Optional[int] = None) -> SampledCurve:
    """
    Resample a closed polyline uniformly in arclength with a periodic spline.

    Frenet data come from the spline derivatives. Straight stretches
    (kappa = 0) receive an arbitrary normal and zero torsion.
    """
    pts = np.asarray(points, dtype=float)
    extent = float(np.ptp(pts, axis=0).max()) if len(pts) else 0.0
    if len(pts) > 1 and np.linalg.norm(pts[0] - pts[-1]) < 1e-9 * max(extent, 1.0):
        pts = pts[:-1]
    m = len(pts)
    if m < 4:
        raise OpenCurveError("need at least four distinct points for a closed curve")
    n = n_samples or m

    chord = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    t = np.concatenate([[0.0], np.cumsum(chord)])
    spline = CubicSpline(t, np.vstack([pts, pts[:1]]), bc_type="periodic")

    fine = np.linspace(0.0, t[-1], 16 * n * 4 + 1)
    speed = np.linalg.norm(spline(fine, 1), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(fine))])
    length = arc[-1]
    s = np.linspace(0.0, length, n + 1)
    tt = np.interp(s, arc, fine)

    d1 = spline(tt, 1)
    d2 = spline(tt, 2)
    d3 = spline(tt, 3)
    cross = np.cross(d1, d2)
    cn = np.linalg.norm(cross, axis=1)
    sp = np.linalg.norm(d1, axis=1)
    kappa = cn / sp**3
    tau = np.where(cn > 1e-12, np.einsum("ij,ij->i", cross, d3) / np.maximum(cn, 1e-300) ** 2, 0.0)

    T = d1 / sp[:, None]
    B = np.where((cn > 1e-12)[:, None], cross / np.maximum(cn, 1e-300)[:, None], 0.0)
    fallback = np.cross(T, np.array([0.0, 0.0, 1.0]))
    fallback_norm = np.linalg.norm(fallback, axis=1, keepdims=True)
    fallback = np.where(
        fallback_norm > 1e-8,
        fallback / np.maximum(fallback_norm, 1e-300),
        np.array([1.0, 0.0, 0.0]),
    )
    B = np.where((cn > 1e-12)[:, None], B, np.cross(T, fallback))
    N = np.cross(B, T)

    return SampledCurve(
        points=spline(tt),
        tangents=T,
        normals=N,
        binormals=B,
        kappa=kappa,
        tau=tau,
        arclength_step=float(length / n),
        closed=True,
    )


def curve_from_loop(mesh: TriMesh, loop: np.ndarray) -> SampledCurve:
    """Closed sampled curve through the vertices of a boundary loop."""
    return sample_closed_curve(mesh.vertices[np.asarray(loop)], n_samples=len(loop))
