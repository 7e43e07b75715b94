"""
Pytest configuration and fixtures.

Provides the FastAPI test client and services wired to reduced numerical
resolutions so that the default suite stays fast.
"""

import os
from typing import Generator

import pytest
from fastapi.testclient import TestClient

# Set test environment before importing app
os.environ["ENVIRONMENT"] = "development"
os.environ["DEBUG"] = "true"
os.environ["LOG_TO_FILE"] = "false"


@pytest.fixture(scope="session")
def app():
    """Create a test application instance."""
    from app.main import create_application

    yield create_application()


@pytest.fixture(scope="session")
def client(app) -> Generator:
    """
    Create a test client for the FastAPI application.

    Yields:
        TestClient instance for making HTTP requests.
    """
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def test_settings():
    """Settings at reduced resolution for unit tests."""
    from app.config.settings import Settings

    return Settings(
        environment="development",
        debug=True,
        n_samples_per_period=512,
        root_scan_points=4000,
        mesh_resolution=48,
        log_to_file=False,
    )


@pytest.fixture
def geometry_service():
    from app.services.discrete_geometry import DiscreteGeometryService

    return DiscreteGeometryService()


@pytest.fixture
def curve_service(test_settings):
    from app.services.elastica_curves import ElasticaCurveService

    return ElasticaCurveService(test_settings)


@pytest.fixture
def delaunay_service(test_settings, geometry_service):
    from app.services.delaunay_surfaces import DelaunaySurfaceService

    return DelaunaySurfaceService(test_settings, geometry_service)


@pytest.fixture
def energy_service(test_settings, geometry_service):
    from app.services.energy_functional import EnergyFunctionalService

    return EnergyFunctionalService(test_settings, geometry_service)


@pytest.fixture
def plateau_service(test_settings, geometry_service, energy_service):
    from app.services.plateau_flow import PlateauFlowService

    return PlateauFlowService(test_settings, geometry_service, energy_service)


@pytest.fixture
def unit_params():
    """a = b = alpha = beta = 1 with c0 = 0."""
    from app.schemas.params import EnergyParams

    return EnergyParams(a=1.0, c0=0.0, b=1.0, alpha=1.0, beta=1.0)


@pytest.fixture
def nodoid_params():
    """a = c0 = b = alpha = beta = 1, the parameters of the nodoid domain pictures."""
    from app.schemas.params import EnergyParams

    return EnergyParams(a=1.0, c0=1.0, b=1.0, alpha=1.0, beta=1.0)
