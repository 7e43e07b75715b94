"""
Custom exceptions and exception handlers.

Every numerical failure carries both an HTTP status (for the API surface) and
a process exit code (for the CLI): 1 for numerical failures, 2 for usage and
validation errors.
"""

from typing import Any, Dict, Optional

from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse

EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class EquilibriumError(Exception):
    """
    Base exception for all toolkit errors.

    Attributes:
        status_code: HTTP status code for the response.
        detail: Human-readable error message.
        error_code: Machine-readable error code.
        exit_code: CLI exit code.
    """

    def __init__(
        self,
        detail: str = "An unexpected error occurred",
        error_code: str = "INTERNAL_ERROR",
        status_code: int = status.HTTP_500_INTERNAL_SERVER_ERROR,
        exit_code: int = EXIT_NUMERICAL,
    ) -> None:
        self.status_code = status_code
        self.detail = detail
        self.error_code = error_code
        self.exit_code = exit_code
        super().__init__(detail)


class UsageError(EquilibriumError):
    """Invalid input that the caller can fix."""

    def __init__(self, detail: str = "Invalid input", error_code: str = "USAGE_ERROR") -> None:
        super().__init__(
            detail=detail,
            error_code=error_code,
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            exit_code=EXIT_USAGE,
        )


class PreconditionError(UsageError):
    """Operation precondition violated."""

    def __init__(self, detail: str = "Precondition violated") -> None:
        super().__init__(detail=detail, error_code="PRECONDITION_FAILED")


class GcdError(PreconditionError):
    """Winding numbers (p, q) are not coprime."""

    def __init__(self, p: int, q: int) -> None:
        super().__init__(detail=f"gcd(p={p}, q={q}) != 1")
        self.error_code = "GCD_ERROR"


class OutOfScopeError(UsageError):
    """Parameters fall in a regime the toolkit does not treat."""

    def __init__(self, detail: str = "Parameters out of scope") -> None:
        super().__init__(detail=detail, error_code="OUT_OF_SCOPE")


class ParameterMismatchError(UsageError):
    """Parameters do not satisfy the relation an evaluator requires."""

    def __init__(self, detail: str = "Parameter mismatch") -> None:
        super().__init__(detail=detail, error_code="PARAMETER_MISMATCH")


class NumericalError(EquilibriumError):
    """A computation failed or missed its tolerance."""

    def __init__(
        self, detail: str = "Numerical failure", error_code: str = "NUMERICAL_ERROR"
    ) -> None:
        super().__init__(
            detail=detail,
            error_code=error_code,
            status_code=status.HTTP_400_BAD_REQUEST,
            exit_code=EXIT_NUMERICAL,
        )


class NoOscillationError(NumericalError):
    def __init__(self, detail: str = "Radicand admits no oscillation interval") -> None:
        super().__init__(detail=detail, error_code="NO_OSCILLATION")


class SingularTorsionError(NumericalError):
    def __init__(self, detail: str = "Torsion is singular at kappa = -mu") -> None:
        super().__init__(detail=detail, error_code="SINGULAR_TORSION")


class DegenerateRadiusError(NumericalError):
    def __init__(self, detail: str = "4d(kappa+mu)^2 - e^2 <= 0 on the profile") -> None:
        super().__init__(detail=detail, error_code="DEGENERATE_RADIUS")


class ClosedCurveNotFoundError(NumericalError):
    """Closure target lies outside the reachable range of the search box."""

    def __init__(self, detail: str, scanned_range: Optional[tuple] = None) -> None:
        super().__init__(detail=detail, error_code="NOT_FOUND")
        self.scanned_range = scanned_range


class InvalidParametersError(NumericalError):
    def __init__(self, detail: str = "Invalid Delaunay parameters") -> None:
        super().__init__(detail=detail, error_code="INVALID_PARAMETERS")


class NegativeDiscriminantError(NumericalError):
    def __init__(self, detail: str = "Negative discriminant") -> None:
        super().__init__(detail=detail, error_code="NEGATIVE_DISCRIMINANT")


class NonPositiveRadiusError(NumericalError):
    def __init__(self, detail: str = "Radius is not positive") -> None:
        super().__init__(detail=detail, error_code="NONPOSITIVE_RADIUS")


class TooCoarseLoopError(NumericalError):
    def __init__(self, detail: str = "Boundary loop has fewer than 8 vertices") -> None:
        super().__init__(detail=detail, error_code="TOO_COARSE_LOOP")


class OpenCurveError(NumericalError):
    def __init__(self, detail: str = "Curve is not closed") -> None:
        super().__init__(detail=detail, error_code="OPEN_CURVE")


class ZeroAreaStarError(NumericalError):
    def __init__(self, detail: str = "Vertex star has zero area") -> None:
        super().__init__(detail=detail, error_code="ZERO_AREA_STAR")


class MeshError(NumericalError):
    """Mesh violates a structural invariant."""

    def __init__(self, detail: str = "Invalid mesh") -> None:
        super().__init__(detail=detail, error_code="INVALID_MESH")


class FlowDivergenceError(NumericalError):
    """Flow displacement kept growing; the partial trace is attached."""

    def __init__(self, detail: str, trace: Any = None) -> None:
        super().__init__(detail=detail, error_code="FLOW_DIVERGENCE")
        self.trace = trace


class PipelineStageError(NumericalError):
    """A reproduction pipeline stage failed."""

    def __init__(self, stage: str, detail: str) -> None:
        super().__init__(detail=f"[{stage}] {detail}", error_code="PIPELINE_STAGE_FAILED")
        self.stage = stage


def create_error_response(
    status_code: int,
    detail: str,
    error_code: str,
    path: str,
) -> Dict[str, Any]:
    """Create a standardized error response body."""
    return {
        "success": False,
        "error": {
            "code": error_code,
            "message": detail,
            "path": path,
        },
    }


async def equilibrium_exception_handler(request: Request, exc: EquilibriumError) -> JSONResponse:
    """Handle EquilibriumError and return a JSON response."""
    return JSONResponse(
        status_code=exc.status_code,
        content=create_error_response(
            status_code=exc.status_code,
            detail=exc.detail,
            error_code=exc.error_code,
            path=str(request.url.path),
        ),
    )


def register_exception_handlers(app: FastAPI) -> None:
    """Register all exception handlers with the FastAPI app."""
    app.add_exception_handler(EquilibriumError, equilibrium_exception_handler)
