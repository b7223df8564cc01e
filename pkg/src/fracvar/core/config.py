"""Configuration management for fracvar.

This module uses Pydantic Settings to load and validate environment variables
for grid sizes, solver tolerances, convexity sampling and logging.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Discretization
    grid_size: int = Field(default=1000, ge=4)

    # Direct method
    basis_degree: int = Field(default=1, ge=1)
    step_tolerance: float = Field(default=1e-10, gt=0)
    max_iterations: int = Field(default=100_000, ge=1)

    # Verification
    grid_residual_tolerance: float = Field(default=1e-3, gt=0)
    basis_residual_tolerance: float = Field(default=1e-6, gt=0)
    convexity_samples: int = Field(default=10_000, ge=1)
    convexity_seed: int = 0
    # Half-width of the (y, z, t, u) sampling box
    convexity_box: float = Field(default=2.0, gt=0)

    # Sweep fan-out
    sweep_workers: int = Field(default=4, ge=1)

    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="FRACVAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Built on first use; reset_settings drops it
_settings: Settings | None = None


def get_settings() -> Settings:
    """Settings from FRACVAR_* variables and .env, shared by every caller."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
