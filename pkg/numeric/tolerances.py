"""Tolerance policy shared by the numerical routines."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from config import TOLERANCE_PROFILE, TOLERANCE_PROFILES
from utils.errors import UsageError


class ToleranceConfig(BaseModel):
    """Numerical tolerances; all strictly positive."""

    model_config = ConfigDict(frozen=True)

    eig_tol: float = Field(default=1e-10, gt=0)
    rank_tol: float = Field(default=1e-8, gt=0)
    gap_tol: float = Field(default=1e-6, gt=0)
    path_step: float = Field(default=1e-2, gt=0)


def get_tolerances(profile: Optional[str] = None) -> ToleranceConfig:
    """Resolve a named tolerance profile (defaults to the environment setting)."""
    name = profile or TOLERANCE_PROFILE
    if name not in TOLERANCE_PROFILES:
        raise UsageError(f"Unknown tolerance profile '{name}'",
                         {"available": sorted(TOLERANCE_PROFILES)})
    return ToleranceConfig(**TOLERANCE_PROFILES[name])


DEFAULT_TOLERANCES = ToleranceConfig()
