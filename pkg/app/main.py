"""
HTTP entry point.

Serves the curve, bound and Delaunay computations as JSON reports. Run with
``uvicorn app.main:app``; batch work and artifact writing go through
``python -m app.cli``.
"""

import logging
from contextlib import asynccontextmanager
from typing import AsyncGenerator

from fastapi import FastAPI

from app.api.v1.router import router as v1_router
from app.config.settings import Settings, get_settings
from app.core.exceptions import register_exception_handlers
from app.core.logging import setup_logging
from app.middleware.request_context import RequestContextMiddleware

logger = logging.getLogger(__name__)

COMPUTATIONS = ("curves", "bounds", "delaunay")


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator:
    # Startup
    settings = get_settings()
    setup_logging()
    logger.info(
        f"Serving {settings.app_name} v{settings.app_version} "
        f"({settings.environment.value}) under {settings.api_prefix}"
    )
    yield
    # Shutdown
    logger.info("Server stopped")


def create_application(settings: Settings | None = None) -> FastAPI:
    """
    Build the app: run-context middleware, error envelope handlers and the v1 routes.

    OpenAPI docs are only mounted in debug mode.
    """
    settings = settings or get_settings()
    docs = settings.debug

    app = FastAPI(
        title=settings.app_name,
        version=settings.app_version,
        description=(
            "Critical curves, Delaunay domains and energy bounds "
            "of the Euler-Helfrich functional"
        ),
        docs_url="/docs" if docs else None,
        redoc_url="/redoc" if docs else None,
        openapi_url="/openapi.json" if docs else None,
        lifespan=lifespan,
    )
    # Run ids for every request
    app.add_middleware(RequestContextMiddleware)
    register_exception_handlers(app)
    app.include_router(v1_router, prefix=settings.api_prefix)

    # Root endpoint lists the computations
    @app.get("/", tags=["Root"])
    async def root():
        return {
            "name": settings.app_name,
            "version": settings.app_version,
            "environment": settings.environment.value,
            "computations": [f"{settings.api_prefix}/{c}" for c in COMPUTATIONS],
            "docs": "/docs" if docs else None,
        }

    return app


app = create_application()
