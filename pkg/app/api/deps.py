"""
Common dependencies for API endpoints.

Provides dependency injection functions for FastAPI routes. Services are
stateless apart from their settings, so each request gets a fresh instance
wired to the cached settings.
"""

from typing import Annotated

from fastapi import Depends

from app.config.settings import Settings, get_settings
from app.interfaces.delaunay_surfaces import IDelaunaySurfaceService
from app.interfaces.elastica_curves import IElasticaCurveService
from app.interfaces.energy_functional import IEnergyFunctionalService
from app.services.delaunay_surfaces import DelaunaySurfaceService
from app.services.elastica_curves import ElasticaCurveService
from app.services.energy_functional import EnergyFunctionalService


def get_settings_dependency() -> Settings:
    """
    Dependency to get application settings.

    Returns:
        Settings instance.
    """
    return get_settings()


def get_curve_service(
    settings: Settings = Depends(get_settings_dependency),
) -> IElasticaCurveService:
    return ElasticaCurveService(settings)


def get_delaunay_service(
    settings: Settings = Depends(get_settings_dependency),
) -> IDelaunaySurfaceService:
    return DelaunaySurfaceService(settings)


def get_energy_service(
    settings: Settings = Depends(get_settings_dependency),
) -> IEnergyFunctionalService:
    return EnergyFunctionalService(settings)


# Type aliases for cleaner dependency injection
SettingsDep = Annotated[Settings, Depends(get_settings_dependency)]
CurveServiceDep = Annotated[IElasticaCurveService, Depends(get_curve_service)]
DelaunayServiceDep = Annotated[IDelaunaySurfaceService, Depends(get_delaunay_service)]
EnergyServiceDep = Annotated[IEnergyFunctionalService, Depends(get_energy_service)]
