"""
Elastica curve service interface.

Defines the contract for solving, reconstructing and closing the critical
curves of the boundary bending energy.
"""

from abc import ABC, abstractmethod
from typing import Optional, Tuple

from app.schemas.geometry import ClosureDefects, CurvatureProfile, SampledCurve
from app.schemas.params import CurveParams, FirstIntegrals, SearchBox
from app.schemas.reports import ClosedCurveReport


class IElasticaCurveService(ABC):
    """Interface for boundary elastica operations."""

    @abstractmethod
    def radicand(self, kappa: float, params: CurveParams, integrals: FirstIntegrals) -> float:
        """Q(kappa) with 4 kappa'^2 = Q."""

    @abstractmethod
    def torsion_from_curvature(
        self, kappa: float, params: CurveParams, integrals: FirstIntegrals
    ) -> float:
        """tau = e / (4 (kappa + mu)^2)."""

    @abstractmethod
    def curvature_profile(
        self, params: CurveParams, integrals: FirstIntegrals, n_samples: Optional[int] = None
    ) -> CurvatureProfile:
        """One period of the oscillating curvature."""

    @abstractmethod
    def circle_solution(self, params: CurveParams) -> Tuple[float, float]:
        """Curvature and radius of the critical circle."""

    @abstractmethod
    def closure_defects(self, profile: CurvatureProfile) -> ClosureDefects:
        """Axial and angular defects over one period."""

    @abstractmethod
    def find_closed_curve(
        self, params: CurveParams, q: int, p: int, search_box: Optional[SearchBox] = None
    ) -> FirstIntegrals:
        """First integrals of a closed (q, p) critical curve."""

    @abstractmethod
    def reconstruct_curve(self, profile: CurvatureProfile, periods: int = 1) -> SampledCurve:
        """Space curve in cylindrical coordinates with its Frenet frame."""

    @abstractmethod
    def el_residual_curve(self, curve: SampledCurve, params: CurveParams) -> float:
        """Normalized derivative of the conserved field; near zero on criticals."""

    @abstractmethod
    def genus_bound(self, q: int, p: int) -> int:
        """Minimal Seifert genus of the (q, p) torus knot."""

    @abstractmethod
    def circle_curve(self, params: CurveParams, n_samples: Optional[int] = None) -> SampledCurve:
        """Sampled critical circle of radius 1 / sqrt(mu^2 + lambda)."""

    @abstractmethod
    def solve_closed_curve(
        self, params: CurveParams, q: int, p: int, search_box: Optional[SearchBox] = None
    ) -> Tuple[ClosedCurveReport, SampledCurve]:
        """Search, reconstruct and report a closed (q, p) curve."""
