# =====================================================
# utils/settings.py - Runtime settings from the environment
# =====================================================

from functools import lru_cache
from typing import List

from pydantic import Field, validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_EPS_LADDER = [0.4, 0.2, 0.1, 0.05, 0.025]


class Settings(BaseSettings):
    """Settings read from ACCELRAD_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="ACCELRAD_", extra="ignore")

    jobs: int = Field(1, ge=1)
    log_level: str = "INFO"
    eps_ladder: str = ",".join(str(e) for e in DEFAULT_EPS_LADDER)
    max_hyp_terms: int = Field(10_000, ge=10)
    quad_max_evals: int = Field(200_000, ge=1_000)
    # halvings of the smallest eps added while the extrapolation is not settled
    eps_extensions: int = Field(3, ge=0)

    @validator('log_level')
    def log_level_validator(cls, v):
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise ValueError('log_level must be DEBUG, INFO, WARNING or ERROR')
        return v

    @validator('eps_ladder')
    def eps_ladder_validator(cls, v):
        values = [float(item) for item in v.split(",") if item.strip()]
        if len(values) < 2:
            raise ValueError('eps_ladder needs at least two values')
        if any(e <= 0 for e in values):
            raise ValueError('eps_ladder values must be positive')
        return v

    def ladder(self) -> List[float]:
        return [float(item) for item in self.eps_ladder.split(",") if item.strip()]


@lru_cache
def get_settings() -> Settings:
    return Settings()
