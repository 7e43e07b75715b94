"""
Energy bound endpoints.

Closed-form infima for discs and annuli, and the witness sequences that
approach the annulus infima.
"""

from typing import List

from fastapi import APIRouter

from app.api.deps import EnergyServiceDep
from app.schemas.reports import BoundClassification, WitnessPoint
from app.schemas.requests import BoundRequest, WitnessRequest
from app.services.energy_functional import WITNESS_RADII

router = APIRouter(prefix="/bounds", tags=["Bounds"])


@router.post("", response_model=BoundClassification, summary="Lower bound classification")
def lower_bound(body: BoundRequest, energy: EnergyServiceDep) -> BoundClassification:
    return energy.lower_bound(body.params.to_params(), body.topology)


@router.post("/witnesses", response_model=List[WitnessPoint], summary="Witness sequence")
def witnesses(body: WitnessRequest, energy: EnergyServiceDep) -> List[WitnessPoint]:
    """Energies along planar, catenoidal or spherical annuli as R grows."""
    return energy.witness_sequence(body.params.to_params(), body.kind, body.radii or WITNESS_RADII)
