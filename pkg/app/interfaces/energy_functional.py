"""
Energy functional service interface.

Defines the contract for energy evaluation, closed-form bounds and the
boundary Euler-Lagrange residuals.
"""

from abc import ABC, abstractmethod
from typing import List, Sequence

from app.schemas.geometry import DelaunayProfile, TriMesh
from app.schemas.params import EnergyParams
from app.schemas.reports import (
    BoundaryResiduals,
    BoundClassification,
    EnergyReport,
    Topology,
    WitnessPoint,
)


class IEnergyFunctionalService(ABC):
    """Interface for the Euler-Helfrich energy and its identities."""

    @abstractmethod
    def evaluate_energy(self, mesh: TriMesh, params: EnergyParams) -> EnergyReport:
        """Surface and boundary terms of the energy on a mesh."""

    @abstractmethod
    def lower_bound(self, params: EnergyParams, topology: Topology) -> BoundClassification:
        """Closed-form infimum or lower bound with its attainment status."""

    @abstractmethod
    def rescaling_identity_residual(self, mesh: TriMesh, params: EnergyParams) -> float:
        """Normalized mismatch of 2 a c0 int (H + c0) + beta L = alpha oint kappa^2."""

    @abstractmethod
    def profile_rescaling_residual(self, profile: DelaunayProfile, params: EnergyParams) -> float:
        """The same identity integrated along a Delaunay meridian."""

    @abstractmethod
    def el_boundary_residuals(self, mesh: TriMesh, params: EnergyParams) -> BoundaryResiduals:
        """Normalized max residuals of the three boundary conditions."""

    @abstractmethod
    def willmore_case_check(self, mesh: TriMesh, params: EnergyParams) -> EnergyReport:
        """Energy in the a = -b, c0 = 0 case."""

    @abstractmethod
    def witness_sequence(
        self, params: EnergyParams, kind: str, radii: Sequence[float]
    ) -> List[WitnessPoint]:
        """Closed-form energies of a sequence approaching an annulus infimum."""
