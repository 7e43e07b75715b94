"""
Toolkit settings.

Server, logging and output options plus the numerical defaults (sample
counts, root and closure tolerances, mesh resolution, flow limits) shared by
the CLI and the HTTP endpoints. Values come from the environment and from
.env / .env.{environment} files.
"""

import os
from enum import Enum
from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Environment(str, Enum):
    DEVELOPMENT = "development"
    STAGING = "staging"
    PRODUCTION = "production"


class Settings(BaseSettings):
    """Environment-backed settings; field names map to upper-case variables (OUTPUT_DIR, ...)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Environment
    environment: Environment = Field(
        default=Environment.DEVELOPMENT,
        description="Application environment",
    )
    debug: bool = Field(
        default=False,
        description="Enable debug mode",
    )

    # Application
    app_name: str = Field(
        default="Euler-Helfrich Toolkit",
        description="Application name",
    )
    app_version: str = Field(
        default="0.1.0",
        description="Application version",
    )
    api_prefix: str = Field(
        default="/api/v1",
        description="API route prefix",
    )

    # Server
    host: str = Field(
        default="0.0.0.0",  # nosec B104 - intentional for container binding
        description="Server host",
    )
    port: int = Field(
        default=8080,
        description="Server port",
    )

    # Output
    output_dir: Path = Field(
        default=Path("output"),
        description="Directory receiving CSV/OBJ/JSON artifacts",
    )

    # Elastic curves
    n_samples_per_period: int = Field(
        default=2048,
        description="Arc-length samples per curvature period",
    )
    root_scan_points: int = Field(
        default=10_000,
        description="Uniform grid size used to bracket radicand roots",
    )
    root_tolerance: float = Field(
        default=1e-12,
        description="Bisection tolerance for radicand roots",
    )
    closure_tolerance: float = Field(
        default=1e-8,
        description="Target tolerance for the closure defects",
    )
    max_winding: int = Field(
        default=16,
        description="Winding cap q_max for closure searches",
    )

    # Meshes and flow
    mesh_resolution: int = Field(
        default=128,
        description="Default angular/profile resolution for revolved meshes",
    )
    flow_max_iters: int = Field(
        default=5000,
        description="Default iteration cap for the mean curvature flow",
    )
    flow_h_tolerance: float = Field(
        default=1e-3,
        description="Default stopping tolerance on max interior |H - H_target|",
    )

    # Logging
    log_level: str = Field(
        default="INFO",
        description="Logging level",
    )
    log_json_format: bool = Field(
        default=False,
        description="Use JSON format for logs",
    )
    log_to_file: bool = Field(
        default=True,
        description="Also write JSON logs to logs/app.log in development",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is a valid Python logging level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v_upper

    @field_validator(
        "n_samples_per_period",
        "root_scan_points",
        "max_winding",
        "mesh_resolution",
        "flow_max_iters",
    )
    @classmethod
    def validate_positive_count(cls, v: int) -> int:
        if v <= 0:
            raise ValueError(f"Expected a positive count, got {v}")
        return v

    @field_validator("root_tolerance", "closure_tolerance", "flow_h_tolerance")
    @classmethod
    def validate_positive_tolerance(cls, v: float) -> float:
        if v <= 0:
            raise ValueError(f"Expected a positive tolerance, got {v}")
        return v

    @property
    def is_development(self) -> bool:
        return self.environment == Environment.DEVELOPMENT

    @property
    def is_production(self) -> bool:
        return self.environment == Environment.PRODUCTION


def load_settings_for_environment(env: str | None = None) -> Settings:
    """Merge .env and .env.{env}; env defaults to $ENVIRONMENT, then development."""
    env = env or os.getenv("ENVIRONMENT", Environment.DEVELOPMENT.value)

    env_files = [p for p in (Path(".env"), Path(f".env.{env}")) if p.exists()]

    # .env.{env} wins over .env
    if env_files:
        return Settings(_env_file=tuple(str(f) for f in env_files))

    return Settings()


@lru_cache
def get_settings() -> Settings:
    """Settings are read once per process; tests build their own `Settings`."""
    return load_settings_for_environment()
