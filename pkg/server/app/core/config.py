from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from typing import Optional
from pathlib import Path
from dotenv import load_dotenv
from pydantic import field_validator

# Load server/.env at import time; variables already exported win
load_dotenv(dotenv_path=Path(__file__).resolve().parents[2] / ".env", override=False)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="GRAVMODES_", extra="ignore")

    # Runtime
    DEBUG: bool = False
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "WARNING"
    LOG_DIR: Optional[str] = None
    WORKERS: int = 1

    # Shooting / eigenvalue search
    SHOOTING_RTOL: float = 1e-11
    EIGEN_RTOL: float = 1e-12
    SEED_ORDER: int = 12
    SEED_REMAINDER_TOL: float = 1e-13
    SEED_OFFSET_FRACTION: float = 1e-4

    # Coordinate map
    MAP_CACHE_SIZE: int = 4096

    # Finite-volume oracle
    # 10^4 cells keep the second-order error near 1e-8; finer meshes reach the eps * N^2 roundoff floor
    ORACLE_CELLS: int = 10_000

    # Output
    DEFAULT_SAMPLES: int = 512

    # Perturbed profiles
    MAX_SERIES_TERMS: int = 8

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize and validate the log level name"""
        cleaned = v.strip().upper()
        if cleaned not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"LOG_LEVEL must be a standard logging level, got {v!r}")
        return cleaned

    @field_validator("SHOOTING_RTOL", "EIGEN_RTOL", "SEED_REMAINDER_TOL")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if not (0.0 < v <= 1e-3):
            raise ValueError("tolerances must lie in (0, 1e-3]")
        return v

    @field_validator("SEED_OFFSET_FRACTION")
    @classmethod
    def validate_offset_fraction(cls, v: float) -> float:
        if not (0.0 < v < 0.1):
            raise ValueError("SEED_OFFSET_FRACTION must lie in (0, 0.1)")
        return v

    @field_validator("WORKERS", "SEED_ORDER", "MAP_CACHE_SIZE", "ORACLE_CELLS", "DEFAULT_SAMPLES", "MAX_SERIES_TERMS")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be a positive integer")
        return v


@lru_cache()
def get_settings():
    """Get application settings with validation"""
    return Settings()
