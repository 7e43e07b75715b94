"""
Energy functional service module.

E = a int (H + c0)^2 dA + b int K dA + oint (alpha kappa^2 + beta) ds over
discs and annuli, together with the closed-form lower bounds and the
boundary Euler-Lagrange conditions of equilibria.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.config.settings import Settings, get_settings
from app.core.exceptions import (
    EquilibriumError,
    NumericalError,
    OutOfScopeError,
    ParameterMismatchError,
    PreconditionError,
    UsageError,
)
from app.interfaces.discrete_geometry import IDiscreteGeometryService
from app.interfaces.energy_functional import IEnergyFunctionalService
from app.schemas.geometry import BoundaryFrame, DelaunayProfile, TriMesh
from app.schemas.params import EnergyParams
from app.schemas.reports import (
    Attainment,
    BoundaryResiduals,
    BoundClassification,
    ConstantMeanCurvatureReport,
    EnergyReport,
    FullEnergyReport,
    LoopEnergy,
    SphericalCapReport,
    Topology,
    WitnessPoint,
)
from app.services.discrete_geometry import DiscreteGeometryService

logger = logging.getLogger(__name__)

WITNESS_RADII = (2.0, 4.0, 8.0, 16.0)
WITNESS_KINDS = ("planar_annuli", "catenoid_slices", "spherical_annuli")
BETA_ZERO_LABEL = "unclassified-by-paper"


def spectral_derivative(values: np.ndarray, ds: np.ndarray, order: int = 1) -> np.ndarray:
    """
    Arclength derivative of periodic samples.

    Differentiates in the sample index with FFT (modes above m/3 dropped)
    and divides by ds/di at each order.
    """
    out = np.asarray(values, dtype=float)
    m = len(out)
    modes = np.fft.fftfreq(m, d=1.0 / m)
    keep = np.abs(modes) <= m / 3.0
    # radians per sample
    k = 2.0 * np.pi * modes / m
    for _ in range(order):
        spectrum = np.fft.fft(out) * keep
        out = np.real(np.fft.ifft(1j * k * spectrum)) / ds
    return out


def _topology_of(mesh: TriMesh) -> Optional[Topology]:
    chi = mesh.euler_characteristic
    loops = len(mesh.boundary_loops)
    if chi == 1 and loops == 1:
        return Topology.DISC
    if chi == 0 and loops == 2:
        return Topology.ANNULUS
    return None


def normalized_residual(total: np.ndarray, terms: Sequence[np.ndarray], scale: float) -> float:
    """max |total| over the larger of its largest constituent and a natural scale."""
    peak = max(float(np.max(np.abs(t))) for t in terms)
    denom = max(peak, scale)
    if denom < 1e-14:
        return 0.0
    return float(np.max(np.abs(total))) / denom


class EnergyFunctionalService(IEnergyFunctionalService):
    """
    Concrete implementation of the energy functional.

    Curvature estimation is delegated to the discrete geometry service.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        geometry: Optional[IDiscreteGeometryService] = None,
    ) -> None:
        self.settings = settings or get_settings()
        self.geometry = geometry or DiscreteGeometryService()

    # ------------------------------------------------------------------
    # Energy evaluation
    # ------------------------------------------------------------------

    def loop_energies(self, mesh: TriMesh, params: EnergyParams) -> List[LoopEnergy]:
        loops = []
        for loop in mesh.boundary_loops:
            frame = self.geometry.boundary_darboux(mesh, loop)
            loops.append(
                LoopEnergy(
                    length=frame.length,
                    bending=float(params.alpha * np.sum(frame.kappa**2 * frame.ds)),
                    length_term=params.beta * frame.length,
                )
            )
        return loops

    def evaluate_energy(self, mesh: TriMesh, params: EnergyParams) -> EnergyReport:
        """
        Evaluate every term of the energy on a mesh.

        Args:
            mesh: Oriented mesh with at least 8 vertices on each boundary loop.
            params: Energy coefficients.

        Returns:
            EnergyReport; bound_gap is set when the topology has a finite bound.

        Raises:
            TooCoarseLoopError: If a boundary loop is too coarse.
            NumericalError: If curvature estimation fails.
        """
        try:
            integrals = self.geometry.integrate_surface(mesh, params)
            loops = self.loop_energies(mesh, params)
        except EquilibriumError:
            raise
        except Exception as e:
            logger.exception(f"Energy evaluation failed: {e}")
            raise NumericalError(f"Energy evaluation failed: {e}") from e

        helfrich = params.a * integrals.total_H_plus_c0_sq
        gauss = params.b * integrals.total_K
        bending = sum(loop.bending for loop in loops)
        length_term = sum(loop.length_term for loop in loops)
        total = helfrich + gauss + bending + length_term

        bound_gap = None
        topology = _topology_of(mesh)
        if topology is not None:
            try:
                bound = self.lower_bound(params, topology)
                if bound.bounded_below and bound.bound is not None:
                    bound_gap = total - bound.bound
            except UsageError as e:
                logger.debug(f"No bound for this mesh: {e.detail}")

        logger.debug(
            f"Energy: helfrich={helfrich:.10g}, gauss={gauss:.10g}, "
            f"bending={bending:.10g}, length={length_term:.10g}"
        )
        return EnergyReport(
            helfrich_term=helfrich,
            gauss_term=gauss,
            boundary_bending=bending,
            boundary_length_term=length_term,
            total=total,
            loops=loops,
            bound_gap=bound_gap,
        )

    # ------------------------------------------------------------------
    # Closed-form bounds
    # ------------------------------------------------------------------

    def lower_bound(self, params: EnergyParams, topology: Topology) -> BoundClassification:
        """
        Classify the infimum of the energy over discs or annuli.

        Raises:
            OutOfScopeError: If c0 < 0.
        """
        if params.c0 < 0:
            raise OutOfScopeError(f"bounds are derived for c0 >= 0, got c0={params.c0}")

        def result(
            case: str,
            attained: Attainment,
            bound: Optional[float] = None,
            witness: Optional[str] = None,
        ) -> BoundClassification:
            bounded = attained not in (Attainment.UNBOUNDED, Attainment.UNCLASSIFIED)
            return BoundClassification(
                topology=topology,
                e_underline=params.e_underline,
                bound=bound if bounded else None,
                bounded_below=bounded,
                case_label=case,
                attained=attained,
                witness=witness,
            )

        if params.beta < 0:
            return result(
                "unbounded", Attainment.UNBOUNDED, witness="long boundary with small curvature"
            )
        if params.beta == 0:
            return result(BETA_ZERO_LABEL, Attainment.UNCLASSIFIED)

        if topology == Topology.ANNULUS:
            classification = self._annulus_bound(params, result)
        else:
            classification = self._disc_bound(params, result)
        logger.info(
            f"{topology.value} bound: case={classification.case_label}, "
            f"value={classification.bound}, attained={classification.attained.value}"
        )
        return classification

    def _annulus_bound(self, params: EnergyParams, result) -> BoundClassification:
        a, b, c0 = params.a, params.b, params.c0
        root = math.sqrt(params.alpha * params.beta)
        e_low = params.e_underline
        four_pi = 4.0 * math.pi
        two_circles = 8.0 * math.pi * root

        if c0 > 0:
            if b == 0:
                return result("(ii)", Attainment.MINIMUM, two_circles, "critical nodoid domain")
            if e_low < 0:
                return result("unbounded", Attainment.UNBOUNDED)
            if b > 0:
                return result("(i)", Attainment.MINIMUM, four_pi * (2.0 * root - b), "N1/N4")
            return result("(iii)", Attainment.MINIMUM, four_pi * (2.0 * root + b), "N2")

        if b == 0:
            return result("(v)", Attainment.MINIMUM, two_circles, "catenoid or planar annulus")
        if b > 0:
            if e_low < 0:
                return result("unbounded", Attainment.UNBOUNDED)
            return result(
                "(iv)",
                Attainment.INFIMUM_ONLY,
                four_pi * (2.0 * root - b),
                "limit of catenoid domains",
            )
        if a + b < 0:
            if e_low < -a:
                return result("unbounded", Attainment.UNBOUNDED)
            return result(
                "(vi)", Attainment.INFIMUM_ONLY, four_pi * (2.0 * root + a + b), "spherical annuli"
            )
        if a + b == 0:
            return result("(vii)", Attainment.MINIMUM, two_circles, "spherical annulus")
        return result("(viii)", Attainment.INFIMUM_ONLY, two_circles, "planar annuli")

    def _disc_bound(self, params: EnergyParams, result) -> BoundClassification:
        a, b, c0 = params.a, params.b, params.c0
        root = math.sqrt(params.alpha * params.beta)
        e_low = params.e_underline
        two_pi = 2.0 * math.pi

        if c0 > 0:
            if e_low < 0:
                return result("unbounded", Attainment.UNBOUNDED)
            value = two_pi * (e_low + b)
            if b != 0:
                return result(
                    "E_D", Attainment.LOWER_BOUND_ONLY, value, "no CMC critical disc exists"
                )
            if c0**2 <= params.beta / params.alpha:
                return result("E_D", Attainment.MINIMUM, value, "spherical cap")
            return result(
                "E_D",
                Attainment.LOWER_BOUND_ONLY,
                value,
                "no spherical cap fits the critical circle",
            )

        if a + b == 0:
            return result("disc-(ii)", Attainment.MINIMUM, 4.0 * math.pi * root, "spherical cap")
        if a + b < 0:
            if e_low < -a:
                return result("unbounded", Attainment.UNBOUNDED)
            return result(
                "disc-(i)", Attainment.INFIMUM_ONLY, two_pi * (2.0 * root + a + b), "spherical caps"
            )
        if b > 0:
            if e_low < 0:
                return result("unbounded", Attainment.UNBOUNDED)
            return result("disc-(iii)", Attainment.MINIMUM, 4.0 * math.pi * root, "planar disc")
        return result("disc-(iv)", Attainment.MINIMUM, 4.0 * math.pi * root, "planar disc")

    def witness_sequence(
        self,
        params: EnergyParams,
        kind: str,
        radii: Sequence[float] = WITNESS_RADII,
    ) -> List[WitnessPoint]:
        """
        Closed-form energies of a sequence approaching an annulus infimum.

        planar_annuli: flat annuli between r0 - 1/R and r0 + 1/R.
        catenoid_slices: catenoids over [-R, R] in neck units, rescaled to boundary radius r0.
        spherical_annuli: equatorial bands of the sphere of radius R bounded by two r0-circles.
        """
        if params.beta <= 0:
            raise PreconditionError("witness sequences need beta > 0")
        if kind not in WITNESS_KINDS:
            raise PreconditionError(
                f"unknown witness kind {kind!r}; expected one of {WITNESS_KINDS}"
            )
        r0 = params.critical_radius
        root = math.sqrt(params.alpha * params.beta)

        def circle(rho: float) -> float:
            return 2.0 * math.pi * (params.alpha / rho + params.beta * rho)

        points = []
        for R in radii:
            if kind == "planar_annuli":
                if 1.0 / R >= r0:
                    raise PreconditionError(f"R={R} too small for boundary radius {r0:.6g}")
                energy = circle(r0 - 1.0 / R) + circle(r0 + 1.0 / R)
            elif kind == "catenoid_slices":
                energy = 8.0 * math.pi * root - 4.0 * math.pi * params.b * math.tanh(R)
            else:
                if R <= r0:
                    raise PreconditionError(
                        f"sphere radius {R} must exceed boundary radius {r0:.6g}"
                    )
                cos_rim = math.sqrt(1.0 - (r0 / R) ** 2)
                energy = 8.0 * math.pi * root + 4.0 * math.pi * (params.a + params.b) * cos_rim
            points.append(WitnessPoint(R=R, energy=energy))
        return points

    # ------------------------------------------------------------------
    # Identities and boundary conditions
    # ------------------------------------------------------------------

    def rescaling_identity_residual(self, mesh: TriMesh, params: EnergyParams) -> float:
        integrals = self.geometry.integrate_surface(mesh, params)
        loops = self.loop_energies(mesh, params)
        length_terms = sum(l.length_term for l in loops)
        lhs = 2.0 * params.a * params.c0 * integrals.total_H_offset + length_terms
        rhs = sum(l.bending for l in loops)
        return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)

    def profile_rescaling_residual(self, profile: DelaunayProfile, params: EnergyParams) -> float:
        """
        Rescaling identity on the surface of revolution of a Delaunay meridian.

        H is constant on the profile, so the surface term is (H + c0) times the
        frustum area of the meridian polyline; the two boundaries are the end
        parallels.
        """
        r, z = profile.r, profile.z
        if r[0] <= 0 or r[-1] <= 0:
            raise PreconditionError("profile must end on two parallels of positive radius")
        segment = np.hypot(np.diff(r), np.diff(z))
        area = float(np.pi * np.sum((r[:-1] + r[1:]) * segment))
        radii = np.array([r[0], r[-1]], dtype=float)
        lhs = (
            2.0 * params.a * params.c0 * (profile.H + params.c0) * area
            + params.beta * 2.0 * np.pi * radii.sum()
        )
        rhs = params.alpha * 2.0 * np.pi * float(np.sum(1.0 / radii))
        return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)

    def _loop_residuals(
        self,
        frame: BoundaryFrame,
        H: np.ndarray,
        dH_dn: np.ndarray,
        params: EnergyParams,
        use_darboux: bool,
    ) -> Dict[str, float]:
        a, b, c0, alpha, beta = params.a, params.b, params.c0, params.alpha, params.beta
        ds = frame.ds

        if use_darboux:
            kappa = np.hypot(frame.kappa_g, frame.kappa_n)
            tau = spectral_derivative(frame.theta, ds) - frame.tau_g
        else:
            kappa = frame.kappa
            tau = frame.tau
        kappa_s = spectral_derivative(kappa, ds)
        kappa_ss = spectral_derivative(kappa, ds, order=2)
        tau_s = spectral_derivative(tau, ds)
        tau_g_s = spectral_derivative(frame.tau_g, ds)

        normal_terms = [
            2.0 * alpha * kappa_ss,
            alpha * kappa**3,
            2.0 * alpha * kappa * tau**2,
            beta * kappa,
        ]
        binormal_terms = [4.0 * alpha * kappa_s * tau, 2.0 * alpha * kappa * tau_s]
        P = normal_terms[0] + normal_terms[1] - normal_terms[2] - normal_terms[3]
        Q = binormal_terms[0] + binormal_terms[1]

        if use_darboux:
            safe = np.where(kappa > 1e-12, kappa, 1.0)
            j_nu = np.where(kappa > 1e-12, (P * frame.kappa_n - Q * frame.kappa_g) / safe, 0.0)
            j_n = np.where(kappa > 1e-12, (P * frame.kappa_g + Q * frame.kappa_n) / safe, 0.0)
        else:
            J = P[:, None] * frame.curvature_normal + Q[:, None] * frame.binormal
            j_nu = np.sum(J * frame.nu, axis=1)
            j_n = np.sum(J * frame.n, axis=1)

        K = self.geometry.boundary_gauss_curvature(frame, H)
        shift = H + c0
        k_bar = max(float(np.mean(kappa)), 2.0 * math.pi / frame.length)
        j_scale = alpha * k_bar**3 + abs(beta) * k_bar + (a + abs(b)) * k_bar**2
        j_parts = [*normal_terms, *binormal_terms]

        el2_terms = [a * shift, b * frame.kappa_n]
        el3_terms = [j_nu, a * dH_dn, b * tau_g_s]
        el4_terms = [j_n, a * shift**2, b * K]
        return {
            "r2": normalized_residual(
                el2_terms[0] + el2_terms[1], el2_terms, (a + abs(b)) * k_bar
            ),
            "r3": normalized_residual(
                j_nu - el3_terms[1] + el3_terms[2], [*el3_terms, *j_parts], j_scale
            ),
            "r4": normalized_residual(
                j_n + el4_terms[1] + el4_terms[2], [*el4_terms, *j_parts], j_scale
            ),
        }

    def _boundary_residuals(
        self, mesh: TriMesh, params: EnergyParams, use_darboux: bool
    ) -> BoundaryResiduals:
        if not mesh.boundary_loops:
            raise PreconditionError("boundary residuals need a mesh with boundary")
        try:
            H_interior = self.geometry.vertex_mean_curvature(mesh)
            H_full = self.geometry.boundary_mean_curvature(mesh, H_interior)
            worst = {"r2": 0.0, "r3": 0.0, "r4": 0.0}
            for loop in mesh.boundary_loops:
                frame = self.geometry.boundary_darboux(mesh, loop)
                dH_dn = self.geometry.conormal_derivative(mesh, H_interior, loop)
                values = self._loop_residuals(frame, H_full[loop], dH_dn, params, use_darboux)
                worst = {k: max(worst[k], v) for k, v in values.items()}
        except EquilibriumError:
            raise
        except Exception as e:
            logger.exception(f"Boundary residual evaluation failed: {e}")
            raise NumericalError(f"Boundary residual evaluation failed: {e}") from e
        return BoundaryResiduals(**worst)

    def el_boundary_residuals(self, mesh: TriMesh, params: EnergyParams) -> BoundaryResiduals:
        """
        Residuals of the boundary conditions from the Frenet frame vectors.

        r2: a (H + c0) + b kappa_n
        r3: J' . nu - a dH/dn + b tau_g'
        r4: J' . n + a (H + c0)^2 + b K
        """
        return self._boundary_residuals(mesh, params, use_darboux=False)

    def el_boundary_residuals_darboux(
        self, mesh: TriMesh, params: EnergyParams
    ) -> BoundaryResiduals:
        """Same residuals rebuilt from the Darboux scalars kappa_g, kappa_n, tau_g."""
        return self._boundary_residuals(mesh, params, use_darboux=True)

    # ------------------------------------------------------------------
    # Special cases
    # ------------------------------------------------------------------

    def willmore_case_check(self, mesh: TriMesh, params: EnergyParams) -> EnergyReport:
        """
        Raises:
            ParameterMismatchError: Unless a = -b and c0 = 0.
        """
        if params.c0 != 0 or not math.isclose(params.a, -params.b, rel_tol=1e-12, abs_tol=1e-15):
            raise ParameterMismatchError(
                "Willmore case needs a = -b and c0 = 0, "
                f"got a={params.a}, b={params.b}, c0={params.c0}"
            )
        return self.evaluate_energy(mesh, params)

    def spherical_cap_check(self, params: EnergyParams) -> SphericalCapReport:
        """Whether a cap with H = -c0 spans the critical circle when b = 0."""
        if params.b != 0:
            raise ParameterMismatchError(f"spherical cap check needs b = 0, got b={params.b}")
        params.require_positive_beta()
        r0 = params.critical_radius
        energy = 4.0 * math.pi * math.sqrt(params.alpha * params.beta)
        if params.c0 == 0:
            return SphericalCapReport(
                exists=True, boundary_radius=r0, polar_angle=0.0, energy=energy
            )
        if params.c0 < 0 or params.c0 * r0 > 1.0:
            return SphericalCapReport(exists=False, boundary_radius=r0)
        return SphericalCapReport(
            exists=True,
            sphere_radius=1.0 / params.c0,
            boundary_radius=r0,
            polar_angle=math.asin(params.c0 * r0),
            energy=energy,
        )

    def constant_mean_curvature_classification(
        self, params: EnergyParams, H: float
    ) -> ConstantMeanCurvatureReport:
        """Admissibility of a CMC equilibrium with mean curvature H != -c0."""
        if H == -params.c0:
            raise PreconditionError("classification applies to H != -c0")
        failed = []
        if not math.isclose(params.a, -params.b, rel_tol=1e-12, abs_tol=1e-15):
            failed.append("a = -b")
        if params.c0 != 0:
            failed.append("c0 = 0")
        if params.beta <= 0 or H**2 > params.beta / params.alpha:
            failed.append("H^2 <= beta/alpha")
        return ConstantMeanCurvatureReport(
            admissible=not failed,
            sphere_radius=1.0 / abs(H) if H != 0 else None,
            failed_conditions=failed,
        )

    def delaunay_annulus_energy(self, params: EnergyParams) -> float:
        """8 pi sqrt(alpha beta) for any Delaunay annulus bounded by critical circles when b = 0."""
        if params.b != 0:
            raise ParameterMismatchError(f"Delaunay annulus energy needs b = 0, got b={params.b}")
        params.require_positive_beta()
        return 8.0 * math.pi * math.sqrt(params.alpha * params.beta)

    def full_energy_report(self, mesh: TriMesh, params: EnergyParams) -> FullEnergyReport:
        energy = self.evaluate_energy(mesh, params)
        bound: Dict[str, object] = {"value": None, "case": None, "attained": None}
        topology = _topology_of(mesh)
        if topology is not None:
            try:
                classification = self.lower_bound(params, topology)
                bound = {
                    "value": classification.bound,
                    "case": classification.case_label,
                    "attained": classification.attained.value,
                }
            except UsageError as e:
                bound["case"] = e.detail
        residuals = self.el_boundary_residuals(mesh, params)
        return FullEnergyReport(
            params=params,
            terms={
                "helfrich": energy.helfrich_term,
                "gauss": energy.gauss_term,
                "boundary_bending": energy.boundary_bending,
                "boundary_length": energy.boundary_length_term,
            },
            total=energy.total,
            bound=bound,
            residuals={
                "el2": residuals.r2,
                "el3": residuals.r3,
                "el4": residuals.r4,
                "rescaling": self.rescaling_identity_residual(mesh, params),
                "gauss_bonnet": self.geometry.gauss_bonnet_residual(mesh),
            },
        )
