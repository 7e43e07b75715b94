"""
Health check endpoints.

Liveness reports the running version; readiness smoke-tests the numerical
stack the solvers depend on.
"""

import logging

import numpy as np
from fastapi import APIRouter, status
from scipy.integrate import quad

from app.api.deps import SettingsDep
from app.schemas.common import HealthStatus, ReadinessStatus

logger = logging.getLogger(__name__)

router = APIRouter(tags=["Health"])


def _check_numpy() -> bool:
    return bool(np.isclose(np.linalg.det(np.eye(3)), 1.0))


def _check_scipy() -> bool:
    value, _ = quad(np.sin, 0.0, np.pi)
    return abs(value - 2.0) < 1e-10


@router.get(
    "/health",
    response_model=HealthStatus,
    status_code=status.HTTP_200_OK,
    summary="Health Check",
    description="Basic liveness check. Returns 200 if the service is running.",
)
async def health_check(settings: SettingsDep) -> HealthStatus:
    return HealthStatus(
        status="healthy",
        version=settings.app_version,
        environment=settings.environment.value,
    )


@router.get(
    "/health/ready",
    response_model=ReadinessStatus,
    status_code=status.HTTP_200_OK,
    summary="Readiness Check",
    description="Readiness check evaluating numpy and scipy.",
)
async def readiness_check() -> ReadinessStatus:
    checks = {}
    for name, check in (("numpy", _check_numpy), ("scipy", _check_scipy)):
        try:
            checks[name] = "healthy" if check() else "unhealthy"
        except Exception as e:
            logger.warning(f"Readiness check {name} raised: {e}")
            checks[name] = "unhealthy"

    all_healthy = all(value == "healthy" for value in checks.values())
    if not all_healthy:
        logger.warning(f"Readiness check failed: {checks}")

    return ReadinessStatus(status="ready" if all_healthy else "not_ready", checks=checks)
