"""
Per-run configuration shared by every CLI verb
"""
import math
from pathlib import Path
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Any, Dict, Literal, Optional, Tuple

from ..core.config import get_settings
from ..core.errors import ConfigError
from .wavefield import WaveKind


class RunConfig(BaseModel):
    """Physical parameters, solver tolerances, grids and output options.

    Defaults describe the reference background E0 (nu = 2, g = 1, z_plus = 1,
    C = 1) at l = 1.
    """
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    # Background
    gamma: float = 1.5
    A: float = Field(default=1.0 / 3.0, gt=0.0)
    g: float = Field(default=1.0, gt=0.0)
    z_plus: float = Field(default=1.0, gt=0.0, alias="zplus")
    lambda_series: Tuple[float, ...] = ()

    # Spectrum
    l: float = Field(default=1.0, gt=0.0)
    n_max: int = Field(default=6, ge=1, alias="nmax")
    n: int = Field(default=1, ge=1)
    tol: float = Field(default_factory=lambda: get_settings().EIGEN_RTOL, ge=1e-12)
    shooting_tol: float = Field(default_factory=lambda: get_settings().SHOOTING_RTOL, gt=0.0, le=1e-3)
    samples: int = Field(default_factory=lambda: get_settings().DEFAULT_SAMPLES, ge=2)
    workers: int = Field(default_factory=lambda: get_settings().WORKERS, ge=1)

    # Waves and surfaces
    kind: Optional[WaveKind] = None
    eps: float = Field(default=0.01, ge=-0.1, le=0.1)
    t_min: float = 0.0
    t_max: Optional[float] = Field(default=None, description="Defaults to one period 2 pi / sqrt(lambda)")
    t_count: int = Field(default=9, ge=2)
    x_min: float = 0.0
    x_max: Optional[float] = Field(default=None, description="Defaults to one wavelength 2 pi / l")
    x_count: int = Field(default=33, ge=2)

    # Validation
    oracle_cells: int = Field(default_factory=lambda: get_settings().ORACLE_CELLS, ge=8)
    weyl_n: int = Field(default=30, ge=2)
    check_points: int = Field(default=1000, ge=10)
    inject_fault: Optional[Literal["kappa"]] = None

    # Output
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    log_level: Optional[str] = None

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v: float) -> float:
        if not (math.isfinite(v) and 1.0 < v < 2.0):
            raise ValueError(f"gamma must satisfy 1 < gamma < 2, got {v!r}")
        return v

    @field_validator("lambda_series", mode="before")
    @classmethod
    def split_series(cls, v: Any) -> Any:
        """Accept "c1, c2, ..." as written in config files and on the command line"""
        if isinstance(v, str):
            return tuple(float(item) for item in v.replace(";", ",").split(",") if item.strip())
        return v

    @field_validator("out")
    @classmethod
    def validate_out(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not v.strip():
            raise ValueError("output path must not be empty")
        return v

    @model_validator(mode="after")
    def validate_ranges(self) -> "RunConfig":
        if self.n > self.n_max:
            raise ValueError(f"mode index n={self.n} exceeds n_max={self.n_max}")
        if self.t_max is not None and self.t_max < self.t_min:
            raise ValueError("t_max must not be below t_min")
        if self.x_max is not None and self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        return self


def parse_config_file(path: str) -> Dict[str, str]:
    """Read flat `key = value` lines; `#` starts a comment.

    Raises:
        ConfigError: unreadable file or a line without `=`
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}", field="config") from exc

    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{number}: expected `key = value`, got {raw.strip()!r}", field="config")
        values[key.replace("-", "_")] = value
    return values


def load_run_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """File values first, then non-None overrides (command-line flags)."""
    values: Dict[str, Any] = parse_config_file(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            values.pop({"z_plus": "zplus", "n_max": "nmax"}.get(key, key), None)
            values[key] = value
    return RunConfig.model_validate(values)
