"""
Plateau flow service interface.

Defines the contract for seeding and relaxing surfaces spanned by fixed
boundary curves.
"""

from abc import ABC, abstractmethod
from typing import Tuple

from app.schemas.geometry import SampledCurve, TriMesh
from app.schemas.params import EnergyParams, FlowConfig
from app.schemas.reports import EquilibriumReport, FlowTrace


class IPlateauFlowService(ABC):
    """Interface for the fixed-boundary mean curvature flow."""

    @abstractmethod
    def initial_disc(self, curve: SampledCurve, rings: int) -> TriMesh:
        """Cone a closed curve to its centroid."""

    @abstractmethod
    def initial_annulus(self, curve1: SampledCurve, curve2: SampledCurve, rings: int) -> TriMesh:
        """Ruled strip between index-aligned samples of two curves."""

    @abstractmethod
    def run_flow(self, mesh: TriMesh, config: FlowConfig) -> Tuple[TriMesh, FlowTrace]:
        """Relax interior vertices until |H - target_H| is below tolerance."""

    @abstractmethod
    def verify_equilibrium(self, mesh: TriMesh, params: EnergyParams) -> EquilibriumReport:
        """Interior and boundary Euler-Lagrange residuals."""
