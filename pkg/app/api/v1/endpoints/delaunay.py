"""
Delaunay surface endpoints.

Classification by (H, flux), the critical nodoidal domains and the
second variation along the convex annular family.
"""

import logging
from typing import List

from fastapi import APIRouter, Query

from app.api.deps import DelaunayServiceDep
from app.schemas.reports import DomainReport, InstabilityReport
from app.schemas.requests import ClassifyRequest, DomainsRequest, EnergyParamsRequest

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/delaunay", tags=["Delaunay"])


@router.post("/classify", summary="Classify a Delaunay surface")
def classify(body: ClassifyRequest, delaunay: DelaunayServiceDep) -> dict:
    kind = delaunay.classify(body.H, body.flux, body.u_constant)
    return {"H": body.H, "flux": body.flux, "kind": kind.value}


@router.post("/domains", response_model=List[DomainReport], summary="Critical nodoid domains")
def domains(body: DomainsRequest, delaunay: DelaunayServiceDep) -> List[DomainReport]:
    """
    Total curvature and energy of the four critical domains.

    Discrete total curvature is only computed when ``discrete`` is set, as it
    revolves and integrates one mesh per domain.
    """
    params = body.params.to_params()
    reports = [
        delaunay.domain_report(domain, params, segments=body.segments, with_discrete=body.discrete)
        for domain in delaunay.enumerate_domains(params)
    ]
    logger.info(f"Served {len(reports)} nodoid domains")
    return reports


@router.post("/instability", response_model=InstabilityReport, summary="Second variation")
def instability(
    body: EnergyParamsRequest,
    delaunay: DelaunayServiceDep,
    step: float = Query(default=1e-4, gt=0),
) -> InstabilityReport:
    return delaunay.instability_second_derivative(body.to_params(), step)
