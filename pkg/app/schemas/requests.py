"""
Request bodies for the HTTP endpoints.

Energy coefficients arrive in either c0 convention and are normalized to the
internal one before reaching a service.
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from app.schemas.params import C0Convention, CurveParams, EnergyParams, SearchBox
from app.schemas.reports import Topology


class EnergyParamsRequest(BaseModel):
    a: float = Field(..., gt=0, description="Bending rigidity")
    c0: float = Field(default=0.0, description="Spontaneous curvature in the chosen convention")
    b: float = Field(default=0.0, description="Saddle-splay modulus")
    alpha: float = Field(..., gt=0, description="Boundary bending rigidity")
    beta: float = Field(..., description="Boundary line tension")
    c0_convention: C0Convention = Field(default=C0Convention.PAPER)

    def to_params(self) -> EnergyParams:
        return EnergyParams.from_convention(
            self.c0_convention, a=self.a, c0=self.c0, b=self.b, alpha=self.alpha, beta=self.beta
        )


class ClosedCurveRequest(BaseModel):
    """Closed-curve search for winding numbers (q, p)."""

    params: CurveParams
    q: int = Field(..., ge=1, description="Curvature periods per closed curve")
    p: int = Field(..., ge=1, description="Turns around the rotation axis")
    search_box: Optional[SearchBox] = None


class BoundRequest(BaseModel):
    params: EnergyParamsRequest
    topology: Topology


class WitnessRequest(BaseModel):
    params: EnergyParamsRequest
    kind: str = Field(..., description="planar_annuli, catenoid_slices or spherical_annuli")
    radii: Optional[List[float]] = Field(
        default=None, min_length=1, description="Defaults to 2, 4, 8, 16"
    )


class ClassifyRequest(BaseModel):
    H: float = Field(..., description="Mean curvature, H <= 0")
    flux: float = Field(..., description="Flux parameter")
    u_constant: bool = Field(default=False, description="Gauss map has constant radial part")


class DomainsRequest(BaseModel):
    params: EnergyParamsRequest
    discrete: bool = Field(default=False, description="Also integrate K on a revolved mesh")
    segments: Optional[int] = Field(
        default=None, gt=2, description="Angular resolution of the mesh"
    )
