"""
Report schemas returned by the services and serialized by the CLI and API.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.schemas.params import EnergyParams


class ReportSchema(BaseModel):
    """Base for JSON-serializable reports."""

    model_config = {"populate_by_name": True}


class SurfaceIntegrals(ReportSchema):
    area: float
    total_H_plus_c0_sq: float = Field(..., description="Integral of (H + c0)^2")
    total_K: float = Field(..., description="Integral of K from interior angle defects")
    total_H_offset: float = Field(..., description="Integral of (H + c0)")


class WirtingerReport(ReportSchema):
    lhs: float = Field(..., description="4 pi^2 / L")
    rhs: float = Field(..., description="Integral of kappa^2 ds")

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs


class LoopEnergy(ReportSchema):
    length: float
    bending: float
    length_term: float


class EnergyReport(ReportSchema):
    helfrich_term: float
    gauss_term: float
    boundary_bending: float
    boundary_length_term: float
    total: float
    loops: List[LoopEnergy] = Field(default_factory=list)
    bound_gap: Optional[float] = None


class Topology(str, Enum):
    DISC = "Disc"
    ANNULUS = "Annulus"


class Attainment(str, Enum):
    MINIMUM = "Minimum"
    INFIMUM_ONLY = "InfimumOnly"
    LOWER_BOUND_ONLY = "LowerBoundOnly"
    UNBOUNDED = "Unbounded"
    UNCLASSIFIED = "Unclassified"


class BoundClassification(ReportSchema):
    topology: Topology
    e_underline: float
    bound: Optional[float] = None
    bounded_below: bool
    case_label: str
    attained: Attainment
    witness: Optional[str] = None


class BoundaryResiduals(ReportSchema):
    r2: float
    r3: float
    r4: float


class EquilibriumReport(ReportSchema):
    el1: float
    el2: float
    el3: float
    el4: float
    interior_vertices_used: int


class ClosedCurveReport(ReportSchema):
    mu: float
    lam: float = Field(..., alias="lambda", serialization_alias="lambda")
    p: int
    q: int
    d: float
    e: float
    period: float
    length: float
    defects: Dict[str, float]
    residual: float


class DomainReport(ReportSchema):
    label: str
    H: float
    flux: float
    boundary_radius: float
    total_curvature_analytic: float
    total_curvature_discrete: Optional[float] = None
    energy_analytic: float
    energy_discrete: Optional[float] = None


class InstabilityReport(ReportSchema):
    analytic: float
    finite_difference: float
    step: float
    unstable_domains: List[str]


class SphericalCapReport(ReportSchema):
    exists: bool
    sphere_radius: Optional[float] = None
    boundary_radius: float
    polar_angle: Optional[float] = None
    energy: Optional[float] = None


class ConstantMeanCurvatureReport(ReportSchema):
    admissible: bool
    sphere_radius: Optional[float] = None
    failed_conditions: List[str] = Field(default_factory=list)


class WitnessPoint(ReportSchema):
    R: float
    energy: float


class FullEnergyReport(ReportSchema):
    params: EnergyParams
    terms: Dict[str, float]
    total: float
    bound: Dict[str, Any]
    residuals: Dict[str, float]


class CheckRow(ReportSchema):
    name: str
    expected: float
    computed: float
    tolerance: float
    passed: bool


class FlowTrace(ReportSchema):
    """Per-iteration history of a flow run."""

    iterations: List[int] = Field(default_factory=list)
    max_h: List[float] = Field(default_factory=list, description="max interior |H - H_target|")
    max_displacement: List[float] = Field(default_factory=list)
    area: List[float] = Field(default_factory=list)
    energy: List[Optional[float]] = Field(default_factory=list)
    converged: bool = False
    time_step: Optional[float] = None

    def record(self, iteration: int, max_h: float, max_displacement: float, area: float) -> None:
        self.iterations.append(iteration)
        self.max_h.append(max_h)
        self.max_displacement.append(max_displacement)
        self.area.append(area)
        self.energy.append(None)

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"iter": i, "maxH": h, "maxdisp": d, "area": a}
            for i, h, d, a in zip(self.iterations, self.max_h, self.max_displacement, self.area)
        ]
