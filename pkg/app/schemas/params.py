"""
Parameter schemas for the Euler-Helfrich energy and the boundary elastica.

All parameter models are immutable pydantic models; invariants are enforced
at construction so that services can assume valid inputs.
"""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FrozenSchema(BaseModel):
    """Base schema for immutable value types."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class C0Convention(str, Enum):
    """Sign convention for the spontaneous curvature."""

    PAPER = "paper"
    COMMON = "common"


class EnergyParams(FrozenSchema):
    """The five coefficients (a, c0, b, alpha, beta) of the Euler-Helfrich functional."""

    a: float = Field(..., gt=0, description="Bending rigidity")
    c0: float = Field(default=0.0, description="Spontaneous curvature (1/length)")
    b: float = Field(default=0.0, description="Saddle-splay modulus")
    alpha: float = Field(..., gt=0, description="Boundary bending rigidity")
    beta: float = Field(..., description="Boundary line tension")

    @classmethod
    def from_convention(
        cls,
        convention: C0Convention,
        a: float,
        c0: float,
        b: float,
        alpha: float,
        beta: float,
    ) -> "EnergyParams":
        """Build params, converting c0 from the common convention (c0 = -c0_common / 2)."""
        if convention == C0Convention.COMMON:
            c0 = -c0 / 2.0
        return cls(a=a, c0=c0, b=b, alpha=alpha, beta=beta)

    @property
    def e_underline(self) -> float:
        """2 sqrt(alpha beta) - |b|; NaN when beta < 0."""
        if self.beta < 0:
            return float("nan")
        return 2.0 * math.sqrt(self.alpha * self.beta) - abs(self.b)

    @property
    def critical_radius(self) -> float:
        """Radius sqrt(alpha/beta) of the critical boundary circle."""
        if self.beta <= 0:
            raise ValueError("critical radius requires beta > 0")
        return math.sqrt(self.alpha / self.beta)

    def require_positive_beta(self) -> None:
        if self.beta <= 0:
            raise ValueError(f"beta must be positive here, got {self.beta}")


class CurveParams(FrozenSchema):
    """Parameters (mu, lambda) of the curve energy integral of (kappa + mu)^2 + lambda."""

    mu: float = Field(default=0.0, description="Curvature offset (1/length)")
    lam: float = Field(..., alias="lambda", description="Tension lambda (1/length^2)")

    @model_validator(mode="after")
    def check_positive_circle_curvature(self) -> "CurveParams":
        if self.lam + self.mu**2 <= 0:
            raise ValueError(
                f"lambda + mu^2 must be positive (got lambda={self.lam}, mu={self.mu})"
            )
        return self

    @property
    def circle_kappa_sq(self) -> float:
        """lambda + mu^2, the squared curvature of the critical circle."""
        return self.lam + self.mu**2

    @classmethod
    def from_energy(cls, params: EnergyParams, mu_sign: int = 1) -> "CurveParams":
        """
        Derive (mu, lambda) from the surface parameters.

        The contact angle theta = +-pi/2 selects the sign of mu = +-b/(2 alpha);
        it is an explicit input, never inferred.
        """
        if mu_sign not in (1, -1):
            raise ValueError("mu_sign must be +1 or -1")
        mu = mu_sign * params.b / (2.0 * params.alpha)
        return cls(mu=mu, lam=params.beta / params.alpha - mu**2)


class FirstIntegrals(FrozenSchema):
    """First-integral constants d = |J|^2 and e = J . I of a critical curve."""

    d: float = Field(..., ge=0, description="Squared length of the Killing field J")
    e: float = Field(default=0.0, description="Inner product J . I")

    @model_validator(mode="after")
    def check_zero_d_forces_zero_e(self) -> "FirstIntegrals":
        if self.d == 0 and self.e != 0:
            raise ValueError("d = 0 forces e = 0")
        return self


class SearchBox(FrozenSchema):
    """Search region for (d, e) in closed-curve shooting."""

    d_min: float = Field(default=0.02, gt=0)
    d_max: float = Field(default=3.0, gt=0)
    e_min: float = Field(default=0.0)
    e_max: float = Field(default=1.5)
    d_points: int = Field(default=60, ge=4)
    e_points: int = Field(default=41, ge=3)

    @model_validator(mode="after")
    def check_ordering(self) -> "SearchBox":
        if self.d_min >= self.d_max or self.e_min >= self.e_max:
            raise ValueError("search box bounds must satisfy min < max")
        return self


class StepMode(str, Enum):
    EXPLICIT = "Explicit"
    SEMI_IMPLICIT = "SemiImplicit"


class FlowConfig(FrozenSchema):
    """Configuration of the fixed-boundary mean curvature flow."""

    time_step: Optional[float] = Field(
        default=None, gt=0, description="Step size; None picks 0.4 * (min edge)^2"
    )
    max_iters: int = Field(default=5000, gt=0)
    h_tolerance: float = Field(default=1e-3, gt=0)
    target_H: float = Field(default=0.0, le=0)
    remesh_interval: int = Field(default=0, ge=0, description="0 disables smoothing")
    step_mode: StepMode = Field(default=StepMode.EXPLICIT)
    snapshot_interval: int = Field(default=0, ge=0, description="0 disables snapshots")
