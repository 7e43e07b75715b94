"""
Response envelopes shared by every endpoint.
"""

from typing import Dict, Literal, Optional

from pydantic import BaseModel, Field


class ErrorDetail(BaseModel):
    code: str = Field(..., description="Error code, e.g. OUT_OF_SCOPE or NO_OSCILLATION")
    message: str = Field(..., description="What went wrong, with the offending values")
    path: Optional[str] = Field(None, description="Request path")


class ErrorResponse(BaseModel):
    """Body returned for every toolkit error and request validation failure."""

    success: bool = Field(default=False)
    error: ErrorDetail


class HealthStatus(BaseModel):
    status: Literal["healthy", "unhealthy"]
    version: str
    environment: str


class ReadinessStatus(BaseModel):
    status: Literal["ready", "not_ready"]
    checks: Dict[str, str] = Field(..., description="Per-library smoke check: healthy/unhealthy")
