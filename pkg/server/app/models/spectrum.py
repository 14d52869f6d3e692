"""
Data models for the singular seed, eigenpairs and spectra
"""
import math
from pydantic import BaseModel, ConfigDict, Field
from typing import Any, Dict, List, Tuple

import numpy as np


class SingularSeed(BaseModel):
    """Recessive series x^alpha_plus * (1 + sum a_k x^2k) at the vacuum endpoint."""
    model_config = ConfigDict(frozen=True)

    K: float
    beta: int = 2
    alpha_plus: float
    alpha_minus: float
    Lambda: float = Field(ge=0.0, description="Spectral parameter 1/lambda")
    coeffs: Tuple[float, ...] = Field(description="a_0 = 1, a_1, ..., a_M")
    order: int = Field(ge=2)
    remainder_factor: float = Field(default=10.0, description="Safety factor on the last term")

    def remainder(self, delta: float) -> float:
        """Estimated relative truncation error of the series at offset delta."""
        return self.remainder_factor * abs(self.coeffs[-1]) * delta ** (2 * self.order)


class SolverDiagnostics(BaseModel):
    """Bookkeeping of an eigenvalue search"""
    count_evaluations: int = 0
    miss_evaluations: int = 0
    cap: float = 0.0
    brackets: List[Tuple[int, float, float]] = Field(default_factory=list)
    seed_offsets: Dict[int, float] = Field(default_factory=dict)
    retries: int = 0


class ModeSolution(BaseModel):
    """One eigenpair with its sampled physical profiles.

    `zeta`/`upsilon` and `z`/`w`/`u`/`deltaP` share the sample index: row k
    holds z[k] and its image zeta[k].
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int = Field(ge=1)
    lambda_n: float = Field(gt=0.0)
    l: float = Field(gt=0.0)
    z: np.ndarray
    zeta: np.ndarray
    upsilon: np.ndarray
    w: np.ndarray
    u: np.ndarray
    deltaP: np.ndarray
    kappa_used: float
    kappa_printed: float
    zero_count: int
    residual_norm: float
    boundary_miss: float
    u_vacuum: float = Field(description="u at z_plus from the endpoint series")
    profile: Any = Field(default=None, exclude=True, repr=False)

    @property
    def Lambda(self) -> float:
        return 1.0 / self.lambda_n

    @property
    def frequency(self) -> float:
        return math.sqrt(self.lambda_n)


class Spectrum(BaseModel):
    """Ordered eigenvalues 1/lambda_1 < 1/lambda_2 < ... and, optionally, the modes."""
    l: float
    inverse_lambdas: List[float]
    modes: List[ModeSolution] = Field(default_factory=list)
    diagnostics: SolverDiagnostics = Field(default_factory=SolverDiagnostics)

    @property
    def lambdas(self) -> List[float]:
        return [1.0 / value for value in self.inverse_lambdas]
