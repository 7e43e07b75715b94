"""
Delaunay surface service interface.

Defines the contract for surfaces of revolution with constant mean
curvature and the critical nodoidal domains.
"""

from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np

from app.schemas.geometry import DelaunayKind, DelaunayProfile, GaussMapPath, NodoidDomain
from app.schemas.params import EnergyParams
from app.schemas.reports import DomainReport, InstabilityReport


class IDelaunaySurfaceService(ABC):
    """Interface for Delaunay surface construction and nodoid domain evaluation."""

    @abstractmethod
    def classify(self, H: float, flux: float, u_constant: bool = False) -> DelaunayKind:
        """Surface type for mean curvature H <= 0 and flux parameter."""

    @abstractmethod
    def radius_from_u(self, u, H: float, flux: float, branch: int = 1):
        """Positive root of H r^2 + u r - flux = 0."""

    @abstractmethod
    def profile_from_flux(
        self, H: float, flux: float, path: GaussMapPath, n_samples: int = 512
    ) -> DelaunayProfile:
        """Meridian along a Gauss-map path."""

    @abstractmethod
    def critical_nodoid(self, params: EnergyParams) -> DelaunayProfile:
        """The nodoid with H = -c0 whose u = 0 parallels have radius sqrt(alpha/beta)."""

    @abstractmethod
    def enumerate_domains(self, params: EnergyParams) -> List[NodoidDomain]:
        """The four critical domains N1..N4."""

    @abstractmethod
    def sigma_epsilon(self, params: EnergyParams, epsilon: float) -> NodoidDomain:
        """Convex annular family through N2 with boundary u = epsilon / r0."""

    @abstractmethod
    def analytic_energy(self, domain: NodoidDomain, params: EnergyParams) -> float:
        """Closed-form energy b * total curvature + 8 pi sqrt(alpha beta)."""

    @abstractmethod
    def instability_second_derivative(
        self, params: EnergyParams, step: float = 1e-4
    ) -> InstabilityReport:
        """Second epsilon-derivative of the Sigma_epsilon energy at 0."""

    @abstractmethod
    def parallel_normal_curvature(self, u: np.ndarray, r: np.ndarray) -> np.ndarray:
        """Normal curvature -u / r of a parallel circle."""

    @abstractmethod
    def domain_report(
        self,
        domain: NodoidDomain,
        params: EnergyParams,
        segments: Optional[int] = None,
        energy_discrete: Optional[float] = None,
        with_discrete: bool = True,
    ) -> DomainReport:
        """Analytic and discrete total curvature and energy of one domain."""
