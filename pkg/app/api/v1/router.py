"""
API v1 router aggregator.

Combines all v1 endpoint routers into a single router.
"""

from fastapi import APIRouter

from app.api.v1.endpoints import bounds, curves, delaunay, health
from app.schemas.common import ErrorResponse

# Numerical failures map to 400, usage errors to 422
ERROR_RESPONSES = {400: {"model": ErrorResponse}, 422: {"model": ErrorResponse}}

router = APIRouter()

router.include_router(health.router)
router.include_router(curves.router, responses=ERROR_RESPONSES)
router.include_router(bounds.router, responses=ERROR_RESPONSES)
router.include_router(delaunay.router, responses=ERROR_RESPONSES)
