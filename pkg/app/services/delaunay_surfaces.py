"""
Delaunay surfaces service module.

A surface of revolution with constant mean curvature H and Gauss map
(u e^{i theta}, w) satisfies u r + H r^2 = flux along its meridian, with
dz = r_u dw. The meridian is parameterized by the normal angle phi,
u = cos(phi) and w = sin(phi); the spherical image of a phi-interval has
signed area 2 pi (sin phi_end - sin phi_start).
"""

import logging
import math
from typing import List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from app.config.settings import Settings, get_settings
from app.core.exceptions import (
    InvalidParametersError,
    NegativeDiscriminantError,
    NonPositiveRadiusError,
    PreconditionError,
)
from app.interfaces.delaunay_surfaces import IDelaunaySurfaceService
from app.interfaces.discrete_geometry import IDiscreteGeometryService
from app.schemas.geometry import (
    DelaunayKind,
    DelaunayProfile,
    GaussMapPath,
    NodoidDomain,
    NodoidLabel,
    TriMesh,
)
from app.schemas.params import EnergyParams
from app.schemas.reports import DomainReport, InstabilityReport
from app.services.discrete_geometry import DiscreteGeometryService
from app.services.mesh_primitives import revolve_profile

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0
# meridian samples for family members that only feed the closed-form energy
FAMILY_SAMPLES = 16

# phi-intervals between u = 0 parallels; u > 0 is the convex outer arc
DOMAIN_PATHS = {
    NodoidLabel.N1: GaussMapPath(HALF_PI, 3.0 * HALF_PI),
    NodoidLabel.N2: GaussMapPath(-HALF_PI, HALF_PI),
    NodoidLabel.N3: GaussMapPath(-HALF_PI, 3.0 * HALF_PI),
    NodoidLabel.N4: GaussMapPath(-3.0 * HALF_PI, 3.0 * HALF_PI),
}


def _family_energy(params: EnergyParams, total_curvature: float) -> float:
    """b times the total curvature plus the two critical boundary circles."""
    return params.b * total_curvature + 8.0 * math.pi * math.sqrt(params.alpha * params.beta)


class DelaunaySurfaceService(IDelaunaySurfaceService):
    """
    Concrete implementation of Delaunay surface construction.

    Discrete checks on revolved domains delegate to the discrete geometry service.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        geometry: Optional[IDiscreteGeometryService] = None,
    ) -> None:
        self.settings = settings or get_settings()
        self.geometry = geometry or DiscreteGeometryService()

    def classify(self, H: float, flux: float, u_constant: bool = False) -> DelaunayKind:
        """
        Classify the Delaunay surface for (H, flux).

        Args:
            H: Mean curvature, H <= 0.
            flux: Flux parameter.
            u_constant: Discriminates cylinders from spheres when H < 0 and the
                surface has constant Gauss-map radial component.

        Raises:
            PreconditionError: If H > 0.
            InvalidParametersError: If H < 0, flux > 0 and 1 + 4 flux H < 0.
        """
        if H > 0:
            raise PreconditionError(f"mean curvature must be <= 0, got {H}")
        if H == 0:
            return DelaunayKind.PLANE if flux == 0 else DelaunayKind.CATENOID
        if flux == 0:
            return DelaunayKind.CYLINDER if u_constant else DelaunayKind.SPHERE
        if flux < 0:
            return DelaunayKind.NODOID
        if 1.0 + 4.0 * flux * H < 0:
            raise InvalidParametersError(f"1 + 4 flux H = {1.0 + 4.0 * flux * H:.6g} < 0")
        if u_constant and 1.0 + 4.0 * flux * H == 0:
            return DelaunayKind.CYLINDER
        return DelaunayKind.UNDULOID

    def radius_from_u(self, u, H: float, flux: float, branch: int = 1):
        """
        Solve H r^2 + u r - flux = 0 for r.

        The plus branch is r = (u + sqrt(u^2 + 4 H flux)) / (-2 H); for H = 0, r = flux / u.

        Raises:
            NegativeDiscriminantError: If u^2 + 4 H flux < 0.
            NonPositiveRadiusError: If the selected root is not positive.
        """
        u_arr = np.asarray(u, dtype=float)
        if H == 0:
            if np.any(u_arr == 0):
                raise NonPositiveRadiusError("u = 0 has no radius when H = 0")
            r = flux / u_arr
        else:
            disc = u_arr**2 + 4.0 * H * flux
            if np.any(disc < -1e-14):
                raise NegativeDiscriminantError(f"u^2 + 4 H flux = {float(np.min(disc)):.6g} < 0")
            root = np.sqrt(np.maximum(disc, 0.0))
            r = (u_arr + branch * root) / (-2.0 * H)
        if np.any(r <= 0):
            raise NonPositiveRadiusError(f"radius {float(np.min(r)):.6g} is not positive")
        return r if np.ndim(r) else float(r)

    def radius_derivative(self, u, r, H: float):
        """r_u = -r / (2 H r + u), from differentiating the flux relation."""
        return -np.asarray(r) / (2.0 * H * np.asarray(r) + np.asarray(u))

    def profile_from_flux(
        self,
        H: float,
        flux: float,
        path: GaussMapPath,
        n_samples: int = 512,
        branch: int = 1,
        u_constant: bool = False,
    ) -> DelaunayProfile:
        """
        Integrate the meridian along a Gauss-map path.

        Args:
            H: Mean curvature.
            flux: Flux parameter.
            path: Interval of the normal angle phi.
            n_samples: Number of intervals; n_samples + 1 samples are returned.
            branch: Root branch of the flux relation.
            u_constant: Cylinder discriminator passed to ``classify``.

        Returns:
            Profile with z(phi_start) = 0.
        """
        kind = self.classify(H, flux, u_constant)
        phi = np.linspace(path.phi_start, path.phi_end, n_samples + 1)
        u = np.cos(phi)
        w = np.sin(phi)
        r = self.radius_from_u(u, H, flux, branch)

        def dz_dphi(p, _z):
            up = math.cos(p)
            rp = self.radius_from_u(up, H, flux, branch)
            return [float(self.radius_derivative(up, rp, H)) * up]

        sol = solve_ivp(
            dz_dphi,
            (path.phi_start, path.phi_end),
            [0.0],
            method="DOP853",
            t_eval=phi,
            rtol=1e-12,
            atol=1e-14,
        )
        if not sol.success:
            raise InvalidParametersError(f"meridian integration failed: {sol.message}")
        logger.debug(
            f"{kind.value} profile H={H}, flux={flux}, "
            f"phi in [{path.phi_start:.4g}, {path.phi_end:.4g}]"
        )
        return DelaunayProfile(
            H=H, flux=flux, kind=kind, path=path, phi=phi, u=u, r=np.atleast_1d(r), z=sol.y[0], w=w
        )

    def _require_nodoid_params(self, params: EnergyParams) -> None:
        if params.c0 <= 0:
            raise PreconditionError(f"critical nodoid requires c0 > 0, got {params.c0}")
        if params.beta <= 0:
            raise PreconditionError(f"critical nodoid requires beta > 0, got {params.beta}")
        if params.b == 0:
            raise PreconditionError("critical nodoid requires b != 0")

    def critical_flux(self, params: EnergyParams) -> float:
        return -params.c0 * params.alpha / params.beta

    def critical_nodoid(
        self, params: EnergyParams, n_samples: Optional[int] = None
    ) -> DelaunayProfile:
        """One full Gauss-map turn phi in [-pi, pi] of the critical nodoid."""
        self._require_nodoid_params(params)
        return self.profile_from_flux(
            -params.c0,
            self.critical_flux(params),
            GaussMapPath(-math.pi, math.pi),
            n_samples or 2 * self.settings.mesh_resolution,
        )

    def enumerate_domains(
        self, params: EnergyParams, n_samples: Optional[int] = None
    ) -> List[NodoidDomain]:
        self._require_nodoid_params(params)
        H = -params.c0
        flux = self.critical_flux(params)
        n = n_samples or self.settings.mesh_resolution
        domains = []
        for label, path in DOMAIN_PATHS.items():
            # keep the sample density per unit of phi comparable across domains
            samples = max(8, int(round(n * path.total_turn / math.pi)))
            domains.append(NodoidDomain(self.profile_from_flux(H, flux, path, samples), label))
        logger.info(
            f"Enumerated {len(domains)} nodoid domains, "
            f"boundary radius {params.critical_radius:.10g}"
        )
        return domains

    def sigma_epsilon(
        self, params: EnergyParams, epsilon: float, n_samples: Optional[int] = None
    ) -> NodoidDomain:
        """
        Convex annulus with flux flux_0 + epsilon and boundary radius r0 held fixed.

        Raises:
            PreconditionError: If epsilon is outside [0, r0).
        """
        self._require_nodoid_params(params)
        r0 = params.critical_radius
        if not 0 <= epsilon < r0:
            raise PreconditionError(f"epsilon must lie in [0, {r0:.6g}), got {epsilon}")
        u_star = epsilon / r0
        half = math.acos(u_star)
        profile = self.profile_from_flux(
            -params.c0,
            self.critical_flux(params) + epsilon,
            GaussMapPath(-half, half),
            n_samples or self.settings.mesh_resolution,
        )
        label = NodoidLabel.N2 if epsilon == 0 else NodoidLabel.SIGMA
        return NodoidDomain(profile, label, epsilon)

    def analytic_energy(self, domain: NodoidDomain, params: EnergyParams) -> float:
        """b times the analytic total curvature plus the two critical boundary circles."""
        return _family_energy(params, domain.total_curvature_analytic)

    def instability_second_derivative(
        self, params: EnergyParams, step: float = 1e-4
    ) -> InstabilityReport:
        """
        -4 pi b / r0^2 and its finite-difference estimate.

        The estimate differences analytic_energy over the Sigma_epsilon domains at
        epsilon in {0, step, 2 step}.

        Raises:
            PreconditionError: If b = 0.
        """
        self._require_nodoid_params(params)
        r0 = params.critical_radius
        analytic = -4.0 * math.pi * params.b / r0**2

        def energy(eps: float) -> float:
            return self.analytic_energy(self.sigma_epsilon(params, eps, FAMILY_SAMPLES), params)

        fd = (energy(2.0 * step) - 2.0 * energy(step) + energy(0.0)) / step**2
        logger.info(f"Instability: analytic={analytic:.12g}, finite difference={fd:.12g}")
        return InstabilityReport(
            analytic=analytic,
            finite_difference=fd,
            step=step,
            unstable_domains=[label.value for label in self.unstable_domains(params)],
        )

    def unstable_domains(self, params: EnergyParams) -> List[NodoidLabel]:
        if params.b > 0:
            return [NodoidLabel.N2, NodoidLabel.N3]
        if params.b < 0:
            return [NodoidLabel.N1, NodoidLabel.N3, NodoidLabel.N4]
        return []

    def parallel_normal_curvature(self, u, r):
        return -np.asarray(u) / np.asarray(r)

    def axisymmetric_boundary_radius(self, params: EnergyParams) -> float:
        """Radius of a kappa_n = 0 boundary parallel on a surface with H = -c0."""
        return params.critical_radius

    def revolve(self, profile: DelaunayProfile, segments: Optional[int] = None) -> TriMesh:
        """Revolved mesh oriented by the Gauss map (u e^{i theta}, w)."""
        return revolve_profile(
            profile.r,
            profile.z,
            segments or self.settings.mesh_resolution,
            profile_normals=np.column_stack([profile.u, profile.w]),
        )

    def discrete_total_curvature(
        self, domain: NodoidDomain, segments: Optional[int] = None
    ) -> float:
        mesh = self.revolve(domain.profile, segments)
        return self.geometry.total_gaussian_curvature(mesh)

    def domain_report(
        self,
        domain: NodoidDomain,
        params: EnergyParams,
        segments: Optional[int] = None,
        energy_discrete: Optional[float] = None,
        with_discrete: bool = True,
    ) -> DomainReport:
        return DomainReport(
            label=domain.label.value,
            H=domain.profile.H,
            flux=domain.profile.flux,
            boundary_radius=domain.boundary_radii[0],
            total_curvature_analytic=domain.total_curvature_analytic,
            total_curvature_discrete=(
                self.discrete_total_curvature(domain, segments) if with_discrete else None
            ),
            energy_analytic=self.analytic_energy(domain, params),
            energy_discrete=energy_discrete,
        )
