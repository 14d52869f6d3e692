"""
Data models for linearized waves and the vacuum surface
"""
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, Optional

import numpy as np


class WaveKind(str, Enum):
    """Standing vibration or progressive wave"""
    TYPE1 = "1"
    TYPE2 = "2"


class BoundarySurface(BaseModel):
    """Vacuum surface z = Z(x_eulerian, t) sampled on a (t, x) grid.

    Arrays are indexed [t, x].
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: WaveKind
    eps: float
    t: np.ndarray
    x: np.ndarray
    exact: np.ndarray
    first_order: np.ndarray
    static_top: Optional[np.ndarray] = Field(default=None, description="Domain top Z(x) on the x grid (Type 2)")

    def deviation(self) -> float:
        return float(np.max(np.abs(self.exact - self.first_order)))


class ResidualReport(BaseModel):
    """Maximum pointwise residuals over a sample set, normalized by term magnitudes"""
    samples: int
    continuity: float = Field(description="-l u + dw/dz")
    horizontal_momentum: float = Field(description="-lambda u + (l/rho) dP")
    vertical_momentum: float = Field(description="-lambda w - g (rho'/rho) w + (1/rho) dP'")
    stream_function: float
    divergence: float

    def as_dict(self) -> Dict[str, float]:
        return self.model_dump(exclude={"samples"})
