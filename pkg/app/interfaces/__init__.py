"""
Interfaces package for service layer abstractions.

Endpoints and the CLI depend on these contracts rather than on the
concrete numerical services.
"""

from app.interfaces.delaunay_surfaces import IDelaunaySurfaceService
from app.interfaces.discrete_geometry import IDiscreteGeometryService
from app.interfaces.elastica_curves import IElasticaCurveService
from app.interfaces.energy_functional import IEnergyFunctionalService
from app.interfaces.plateau_flow import IPlateauFlowService

__all__ = [
    "IDelaunaySurfaceService",
    "IDiscreteGeometryService",
    "IElasticaCurveService",
    "IEnergyFunctionalService",
    "IPlateauFlowService",
]
