"""
Boundary curve endpoints.

Critical circles, closed (q, p) torus-knot curves and their Seifert genus.
"""

import logging

from fastapi import APIRouter, Query

from app.api.deps import CurveServiceDep
from app.schemas.params import CurveParams
from app.schemas.reports import ClosedCurveReport
from app.schemas.requests import ClosedCurveRequest

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/curves", tags=["Curves"])


@router.post("/circle", summary="Critical circle")
def critical_circle(params: CurveParams, curves: CurveServiceDep) -> dict:
    """Curvature and radius of the critical circle for (mu, lambda)."""
    kappa, radius = curves.circle_solution(params)
    return {"kappa": kappa, "radius": radius}


@router.post("/closed", response_model=ClosedCurveReport, summary="Closed critical curve")
def closed_curve(body: ClosedCurveRequest, curves: CurveServiceDep) -> ClosedCurveReport:
    """
    Search the (d, e) box for a closed (q, p) curve.

    Returns:
        The first integrals, period, closure defects and Euler-Lagrange residual.
        The sampled curve itself is only written by the command-line tool.
    """
    report, _ = curves.solve_closed_curve(body.params, body.q, body.p, body.search_box)
    logger.info(f"Closed ({body.q},{body.p}) curve served, residual={report.residual:.3g}")
    return report


@router.get("/genus", summary="Torus knot genus")
def genus(
    curves: CurveServiceDep,
    q: int = Query(..., ge=1),
    p: int = Query(..., ge=1),
) -> dict:
    return {"q": q, "p": p, "genus": curves.genus_bound(q, p)}
