"""
Data models for the background state
"""
from pydantic import BaseModel, ConfigDict, Field
from typing import Optional, Tuple


class Equilibrium(BaseModel):
    """Barotropic background touching vacuum at z = z_plus.

    The density is rho(z) = C_rho * s**nu * (1 + c1*s + c2*s**2 + ...) with
    s = z_plus - z, and vanishes for z >= z_plus.
    """
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=1.0, lt=2.0, description="Adiabatic exponent")
    A: float = Field(gt=0.0, description="Entropy constant of P = A rho^gamma")
    g: float = Field(gt=0.0, description="Gravitational acceleration")
    z_plus: float = Field(gt=0.0, description="Height of the vacuum boundary")
    nu: float = Field(gt=1.0, description="Exponent 1/(gamma-1)")
    C_rho: float = Field(gt=0.0, description="Density amplitude ((gamma-1)g/(A gamma))^nu")
    lambda_series: Tuple[float, ...] = Field(default=(), description="Correction coefficients c1, c2, ...")

    @property
    def is_power_law(self) -> bool:
        return not any(self.lambda_series)


class BackgroundSample(BaseModel):
    """Background quantities at one height"""
    z: float
    rho: float = Field(ge=0.0)
    drho: float = Field(le=0.0)
    pressure: float = Field(ge=0.0)
    N_sq: Optional[float] = Field(default=None, description="Squared buoyancy frequency")
    scale_height: Optional[float] = Field(default=None, description="Density scale height")
