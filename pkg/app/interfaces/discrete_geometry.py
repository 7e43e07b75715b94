"""
Discrete geometry service interface.

Defines the contract for the mesh curvature estimators.
"""

from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from app.schemas.geometry import BoundaryFrame, SampledCurve, TriMesh
from app.schemas.params import EnergyParams
from app.schemas.reports import SurfaceIntegrals, WirtingerReport


class IDiscreteGeometryService(ABC):
    """Interface for discrete surface and boundary estimators."""

    @abstractmethod
    def vertex_mean_curvature(self, mesh: TriMesh) -> np.ndarray:
        """Per-vertex mean curvature (NaN on boundary vertices); unit sphere gives -1."""

    @abstractmethod
    def vertex_gaussian_curvature(self, mesh: TriMesh) -> np.ndarray:
        """Per-vertex angle defects (integrated Gaussian curvature)."""

    @abstractmethod
    def boundary_darboux(self, mesh: TriMesh, loop: np.ndarray) -> BoundaryFrame:
        """Darboux frame samples along one boundary loop."""

    @abstractmethod
    def integrate_surface(self, mesh: TriMesh, params: EnergyParams) -> SurfaceIntegrals:
        """Area, integral of (H+c0)^2, integral of K and integral of (H+c0)."""

    @abstractmethod
    def gauss_bonnet_residual(
        self, mesh: TriMesh, loops: Optional[Sequence[np.ndarray]] = None
    ) -> float:
        """|int K - oint kappa_g - 2 pi chi| with the discrete operators."""

    @abstractmethod
    def wirtinger_check(self, curve: SampledCurve) -> WirtingerReport:
        """Both sides of 4 pi^2 / L <= oint kappa^2."""
