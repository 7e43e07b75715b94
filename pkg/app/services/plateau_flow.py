"""
Plateau flow service module.

Fixed-boundary mean curvature flow: interior vertices move with velocity
(H - H_target) nu until the mean curvature is uniform. Target zero yields
minimal surfaces; a negative target yields prescribed mean curvature
surfaces without a volume constraint.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from app.config.settings import Settings, get_settings
from app.core.exceptions import (
    EquilibriumError,
    FlowDivergenceError,
    NumericalError,
    OpenCurveError,
    PreconditionError,
)
from app.interfaces.discrete_geometry import IDiscreteGeometryService
from app.interfaces.plateau_flow import IPlateauFlowService
from app.schemas.geometry import SampledCurve, TriMesh
from app.schemas.params import EnergyParams, FlowConfig, StepMode
from app.schemas.reports import EquilibriumReport, FlowTrace
from app.services.discrete_geometry import (
    DiscreteGeometryService,
    cotangent_laplacian,
    mixed_areas,
    vertex_normals,
)
from app.services.energy_functional import EnergyFunctionalService, normalized_residual
from app.services.mesh_primitives import fan, orient_faces, stacked_rings, stitch_rings

logger = logging.getLogger(__name__)

STABILITY_FACTOR = 0.4
DIVERGENCE_WINDOW = 20
EQUILIBRIUM_DEPTH = 2
LOG_EVERY = 100


def _periodic_points(points: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Linear interpolation of a closed polygon at turn fractions t in [0, 1)."""
    m = len(points)
    x = (t % 1.0) * m
    i = np.floor(x).astype(np.int64) % m
    frac = (x - np.floor(x))[:, None]
    return (1.0 - frac) * points[i] + frac * points[(i + 1) % m]


def _area_vector(points: np.ndarray) -> np.ndarray:
    c = points - points.mean(axis=0)
    return 0.5 * np.cross(c, np.roll(c, -1, axis=0)).sum(axis=0)


def _adjacency(mesh: TriMesh) -> sparse.csr_matrix:
    e = mesh.edges
    n = mesh.n_vertices
    ones = np.ones(len(e))
    adj = sparse.coo_matrix((ones, (e[:, 0], e[:, 1])), shape=(n, n))
    return (adj + adj.T).tocsr()


def _loop_length(points: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1).sum())


def edge_lengths(mesh: TriMesh) -> np.ndarray:
    e = mesh.edges
    return np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)


def min_edge_length(mesh: TriMesh) -> float:
    return float(np.min(edge_lengths(mesh)))


def deep_interior(mesh: TriMesh, depth: int = EQUILIBRIUM_DEPTH) -> np.ndarray:
    """Mask of interior vertices more than ``depth`` edges away from the boundary."""
    adj = _adjacency(mesh)
    near = mesh.boundary_mask.copy()
    for _ in range(depth):
        near = near | (adj @ near.astype(float) > 0)
    return mesh.interior_mask & ~near


class PlateauFlowService(IPlateauFlowService):
    """
    Concrete implementation of the fixed-boundary flow.

    The flow owns the vertex buffer it evolves; estimators only ever see
    immutable snapshots taken between steps.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        geometry: Optional[IDiscreteGeometryService] = None,
        energy: Optional[EnergyFunctionalService] = None,
    ) -> None:
        self.settings = settings or get_settings()
        self.geometry = geometry or DiscreteGeometryService()
        self.energy = energy or EnergyFunctionalService(self.settings, self.geometry)

    # ------------------------------------------------------------------
    # Seed surfaces
    # ------------------------------------------------------------------

    def initial_disc(self, curve: SampledCurve, rings: int) -> TriMesh:
        """
        Cone a closed curve to its centroid with concentric rings.

        The boundary loop is exactly the curve samples. Self-intersecting
        cones are not detected.

        Raises:
            PreconditionError: If rings < 1.
            OpenCurveError: If the curve is not closed.
        """
        if rings < 1:
            raise PreconditionError(f"rings must be at least 1, got {rings}")
        if not curve.closed:
            raise OpenCurveError("initial disc needs a closed boundary curve")
        boundary = curve.loop_points()
        m = len(boundary)
        centroid = boundary.mean(axis=0)

        vertices = [centroid[None, :]]
        ring_ids = [np.array([0], dtype=np.int64)]
        ring_params = [np.array([0.0])]
        offset = 1
        for k in range(1, rings + 1):
            if k == rings:
                t = np.arange(m) / m
                pts = boundary
            else:
                n_k = max(6, int(round(m * k / rings)))
                t = (np.arange(n_k) + 0.5 * (k % 2)) / n_k
                pts = centroid + (k / rings) * (_periodic_points(boundary, t) - centroid)
            vertices.append(pts)
            ring_ids.append(np.arange(offset, offset + len(pts), dtype=np.int64))
            ring_params.append(t)
            offset += len(pts)

        faces = [fan(0, ring_ids[1])]
        for k in range(1, rings):
            faces.append(
                stitch_rings(ring_ids[k], ring_ids[k + 1], ring_params[k], ring_params[k + 1])
            )
        v = np.vstack(vertices)
        normal = _area_vector(boundary)
        f = orient_faces(v, np.vstack(faces), lambda p: np.tile(normal, (len(p), 1)))
        mesh = TriMesh.from_arrays(v, f)
        logger.info(
            f"Initial disc: {mesh.n_vertices} vertices, {mesh.n_faces} faces, "
            f"chi={mesh.euler_characteristic}"
        )
        return mesh

    def initial_annulus(self, curve1: SampledCurve, curve2: SampledCurve, rings: int) -> TriMesh:
        """
        Ruled annulus between index-aligned samples of two closed curves.

        Raises:
            PreconditionError: If rings < 1 or the sample counts differ.
        """
        if rings < 1:
            raise PreconditionError(f"rings must be at least 1, got {rings}")
        c1 = curve1.loop_points()
        c2 = curve2.loop_points()
        if len(c1) != len(c2):
            raise PreconditionError(f"sample counts differ: {len(c1)} vs {len(c2)}")
        ring_points = [(1.0 - t) * c1 + t * c2 for t in np.linspace(0.0, 1.0, rings + 1)]
        v, f = stacked_rings(ring_points)

        center = 0.5 * (c1.mean(axis=0) + c2.mean(axis=0))
        axis = c2.mean(axis=0) - c1.mean(axis=0)
        if np.linalg.norm(axis) < 1e-12:
            axis = _area_vector(c1)
        axis = axis / np.linalg.norm(axis)

        def outward(points: np.ndarray) -> np.ndarray:
            rel = points - center
            return rel - np.outer(rel @ axis, axis)

        mesh = TriMesh.from_arrays(v, orient_faces(v, f, outward))
        logger.info(f"Initial annulus: {mesh.n_vertices} vertices, chi={mesh.euler_characteristic}")
        return mesh

    # ------------------------------------------------------------------
    # Flow
    # ------------------------------------------------------------------

    def stable_time_step(self, mesh: TriMesh) -> float:
        """Explicit step bound 0.4 (min edge)^2."""
        return STABILITY_FACTOR * min_edge_length(mesh) ** 2

    def _explicit_step(
        self, mesh: TriMesh, deviation: np.ndarray, free: np.ndarray, dt: float
    ) -> np.ndarray:
        nu = vertex_normals(mesh)
        new = mesh.vertices.copy()
        new[free] += dt * deviation[:, None] * nu[free]
        return new

    def _semi_implicit_step(
        self, mesh: TriMesh, free: np.ndarray, dt: float, target_H: float
    ) -> np.ndarray:
        """Solve (A - dt/2 W) x_new = A x - dt H_target A nu on free vertices."""
        W = cotangent_laplacian(mesh)
        A = mixed_areas(mesh)
        x = mesh.vertices
        system = (sparse.diags(A) - 0.5 * dt * W).tocsr()
        fi = np.flatnonzero(free)
        bi = np.flatnonzero(~free)
        rhs = A[fi, None] * x[fi]
        if target_H != 0:
            rhs -= dt * target_H * A[fi, None] * vertex_normals(mesh)[fi]
        rows = system[fi]
        rhs -= rows[:, bi] @ x[bi]
        solved = splu(rows[:, fi].tocsc()).solve(rhs)
        new = x.copy()
        new[free] = solved
        return new

    def _tangential_smooth(self, mesh: TriMesh, free: np.ndarray) -> np.ndarray:
        """Area-weighted umbrella step on free vertices, projected to the tangent plane."""
        adj = _adjacency(mesh)
        A = mixed_areas(mesh)
        weights = adj @ A
        weights = np.where(weights > 0, weights, 1.0)
        average = (adj @ (A[:, None] * mesh.vertices)) / weights[:, None]
        delta = average - mesh.vertices
        nu = vertex_normals(mesh)
        delta -= np.sum(delta * nu, axis=1, keepdims=True) * nu
        new = mesh.vertices.copy()
        new[free] += 0.5 * delta[free]
        return new

    def run_flow(self, mesh: TriMesh, config: FlowConfig) -> Tuple[TriMesh, FlowTrace]:
        """
        Evolve interior vertices with the boundary held fixed.

        Args:
            mesh: Seed mesh whose fixed_mask is exactly the boundary.
            config: Step size, stopping rule and step mode.

        Returns:
            Final mesh and the per-iteration trace.

        Raises:
            PreconditionError: If the fixed mask or step size is invalid.
            FlowDivergenceError: If the displacement grows for 20 consecutive steps.
        """
        if mesh.fixed_mask is None or not np.array_equal(mesh.fixed_mask, mesh.boundary_mask):
            raise PreconditionError("fixed_mask must cover exactly the boundary vertices")
        bound = self.stable_time_step(mesh)
        dt = config.time_step or bound
        if config.step_mode == StepMode.EXPLICIT and dt > bound:
            raise PreconditionError(f"time step {dt:.3g} exceeds the explicit bound {bound:.3g}")

        free = mesh.interior_mask
        trace = FlowTrace(time_step=dt)
        x = mesh.vertices.copy()
        growth = 0
        last_disp = np.inf
        min_disp = np.inf
        logger.info(
            f"Flow start: {int(free.sum())} free vertices, dt={dt:.4g}, "
            f"mode={config.step_mode.value}, target_H={config.target_H}"
        )

        for iteration in range(config.max_iters):
            current = mesh.with_vertices(x)
            try:
                H = self.geometry.vertex_mean_curvature(current)
            except EquilibriumError:
                raise
            except Exception as e:
                logger.exception(f"Curvature evaluation failed at iteration {iteration}: {e}")
                raise NumericalError(
                    f"Curvature evaluation failed at iteration {iteration}: {e}"
                ) from e
            deviation = H[free] - config.target_H
            max_h = float(np.max(np.abs(deviation))) if deviation.size else 0.0
            area = float(current.face_areas.sum())

            if max_h < config.h_tolerance:
                trace.record(iteration, max_h, 0.0, area)
                trace.converged = True
                break

            if config.step_mode == StepMode.EXPLICIT:
                new = self._explicit_step(current, deviation, free, dt)
            else:
                new = self._semi_implicit_step(current, free, dt, config.target_H)
            if config.remesh_interval and (iteration + 1) % config.remesh_interval == 0:
                new = self._tangential_smooth(mesh.with_vertices(new), free)

            disp = float(np.max(np.linalg.norm(new - x, axis=1)))
            trace.record(iteration, max_h, disp, area)
            if not np.isfinite(disp):
                raise FlowDivergenceError(
                    f"non-finite displacement at iteration {iteration}", trace
                )
            growth = growth + 1 if disp > last_disp else 0
            min_disp = min(min_disp, disp)
            if growth >= DIVERGENCE_WINDOW and disp > 2.0 * min_disp:
                raise FlowDivergenceError(
                    f"displacement grew for {growth} consecutive steps (now {disp:.3g})", trace
                )
            last_disp = disp
            x = new
            if iteration % LOG_EVERY == 0:
                logger.debug(
                    f"Flow iter {iteration}: max|H-H0|={max_h:.3e}, "
                    f"disp={disp:.3e}, area={area:.10g}"
                )

        final = mesh.with_vertices(x)
        if trace.converged:
            logger.info(
                f"Flow converged after {trace.iterations[-1]} iterations, "
                f"max|H-H0|={trace.max_h[-1]:.3e}"
            )
        else:
            logger.warning(
                f"Flow stopped at max_iters={config.max_iters}, max|H-H0|={trace.max_h[-1]:.3e}"
            )
        if config.target_H == 0:
            self._check_area_monotone(trace)
        return final, trace

    def _check_area_monotone(self, trace: FlowTrace) -> bool:
        """Area must not increase over the trailing 90% of iterations."""
        area = np.asarray(trace.area)
        tail = area[len(area) // 10 :]
        rises = np.diff(tail) > 1e-12 * max(float(tail.max(initial=0.0)), 1.0)
        if np.any(rises):
            logger.warning(f"Area increased on {int(rises.sum())} steps after the transient")
            return False
        return True

    # ------------------------------------------------------------------
    # Equilibrium check
    # ------------------------------------------------------------------

    def interior_residual(self, mesh: TriMesh, params: EnergyParams) -> Tuple[float, int]:
        """
        Max-norm of Delta H + 2 (H + c0)(H (H - c0) - K) away from the boundary.

        Normalized by the largest of its own terms |Delta H|, |2 (H + c0) H (H - c0)|
        and |2 (H + c0) K|, floored at kappa_bar^3.
        """
        deep = deep_interior(mesh)
        if not np.any(deep):
            return 0.0, 0
        H_int = self.geometry.vertex_mean_curvature(mesh)
        H = self.geometry.boundary_mean_curvature(mesh, H_int) if mesh.boundary_loops else H_int
        A = mixed_areas(mesh)
        K = self.geometry.gaussian_curvature_density(mesh, A)
        lap_H = (cotangent_laplacian(mesh) @ H) / np.where(A > 0, A, 1.0)
        shift = H + params.c0
        cubic = 2.0 * shift * H * (H - params.c0)
        gauss = 2.0 * shift * K

        boundary_length = sum(_loop_length(mesh.vertices[loop]) for loop in mesh.boundary_loops)
        if boundary_length > 0:
            kappa_bar = 2.0 * np.pi / boundary_length
        else:
            kappa_bar = 1.0 / np.sqrt(mesh.face_areas.sum())
        value = normalized_residual(
            (lap_H + cubic - gauss)[deep],
            [lap_H[deep], cubic[deep], gauss[deep]],
            kappa_bar**3,
        )
        return value, int(deep.sum())

    def verify_equilibrium(self, mesh: TriMesh, params: EnergyParams) -> EquilibriumReport:
        el1, used = self.interior_residual(mesh, params)
        boundary = self.energy.el_boundary_residuals(mesh, params)
        logger.info(
            f"Equilibrium residuals: el1={el1:.3e}, el2={boundary.r2:.3e}, "
            f"el3={boundary.r3:.3e}, el4={boundary.r4:.3e}"
        )
        return EquilibriumReport(
            el1=el1, el2=boundary.r2, el3=boundary.r3, el4=boundary.r4, interior_vertices_used=used
        )
