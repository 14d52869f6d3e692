"""
Inward shooting from the vacuum endpoint.

The state (v, dv/dx, theta) is integrated in t = sqrt(z_plus - z) from the
seed point x = delta to the ground (t = sqrt(z_plus), zeta = 0), with
x = zeta_plus - zeta and dx/dt supplied by the chart.  theta is the Pruefer
phase of (v, dv/dx); v vanishes exactly when theta crosses a multiple of pi.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from ...core.config import get_settings
from ...core.errors import IntegrationError, InvalidArgumentError
from ...core.logging import get_logger
from ...models.spectrum import SingularSeed
from ..frobenius.seed import build_seed, seed_eval, seed_offset
from ..liouville.chart import LiouvilleChart

logger = get_logger("services.spectrum.shooting")


@dataclass
class ShootingResult:
    Lambda: float
    seed: SingularSeed
    delta: float
    t_seed: float
    norm: float
    upsilon_end: float
    phase_end: float
    solution: Optional[object] = None

    @property
    def count(self) -> int:
        """Interior zeros of v on (0, zeta_plus), from the phase."""
        k = int(math.floor(self.phase_end / math.pi))
        if self.upsilon_end != 0.0 and (self.upsilon_end > 0.0) != (k % 2 == 0):
            # phase within rounding of a multiple of pi; trust the sign of v
            frac = self.phase_end / math.pi - k
            k = k + 1 if frac > 0.5 else k - 1
        return max(k, 0)


class Shooter:
    """Integrates the recessive solution for any Lambda >= 0 on one chart."""

    def __init__(self, chart: LiouvilleChart, rtol: float = None, seed_order: int = None):
        settings = get_settings()
        self.chart = chart
        self.rtol = rtol or settings.SHOOTING_RTOL
        self.atol = self.rtol * 1e-3
        self.seed_order = seed_order or settings.SEED_ORDER
        self.delta0 = settings.SEED_OFFSET_FRACTION * chart.zeta_plus

    def _rhs(self, Lambda: float):
        chart = self.chart

        def rhs(t, y):
            v, dv, theta = y
            q = chart.q_of_s(t * t)
            speed = chart.speed(t)
            sn, cs = math.sin(theta), math.cos(theta)
            return [dv * speed, (q - Lambda) * v * speed, (cs * cs + (Lambda - q) * sn * sn) * speed]

        return rhs

    def seed(self, Lambda: float):
        seed = build_seed(self.chart, Lambda, self.seed_order)
        delta = seed_offset(seed, self.delta0)
        if delta < self.delta0:
            logger.warning("Seed offset halved", extra={"Lambda": Lambda, "delta": delta})
        return seed, delta, self.chart.t_of_offset(delta)

    def integrate(self, Lambda: float, dense: bool = False, t_end: float = None) -> ShootingResult:
        if not (math.isfinite(Lambda) and Lambda >= 0.0):
            raise InvalidArgumentError(f"Lambda must be finite and non-negative, got {Lambda!r}", field="Lambda")
        seed, delta, t_seed = self.seed(Lambda)
        v, dv_dzeta = seed_eval(seed, delta)
        dv_dx = -dv_dzeta
        norm = max(abs(v), abs(dv_dx))
        y0 = [v / norm, dv_dx / norm, math.atan2(v, dv_dx)]
        t_end = self.chart.t_plus if t_end is None else t_end

        sol = solve_ivp(
            self._rhs(Lambda), (t_seed, t_end), y0, method="DOP853",
            rtol=self.rtol, atol=self.atol, dense_output=dense,
        )
        if not sol.success:
            raise IntegrationError(f"shooting failed for Lambda={Lambda!r}: {sol.message}", location=float(sol.t[-1]))

        return ShootingResult(
            Lambda=Lambda, seed=seed, delta=delta, t_seed=t_seed, norm=norm,
            upsilon_end=float(sol.y[0, -1] * norm), phase_end=float(sol.y[2, -1]),
            solution=sol.sol if dense else None,
        )

    def miss(self, Lambda: float) -> float:
        return self.integrate(Lambda).upsilon_end

    def count(self, Lambda: float) -> int:
        return self.integrate(Lambda).count


def _positive(Lambda: float) -> None:
    if not (math.isfinite(Lambda) and Lambda > 0.0):
        raise InvalidArgumentError(f"Lambda must be positive, got {Lambda!r}", field="Lambda")


def shoot_miss(chart: LiouvilleChart, Lambda: float, rtol: float = None) -> float:
    """v(zeta = 0; Lambda) for the seed normalized as x^alpha (1 + ...)."""
    _positive(Lambda)
    return Shooter(chart, rtol=rtol).miss(Lambda)


def oscillation_count(chart: LiouvilleChart, Lambda: float, rtol: float = None) -> int:
    """Number of interior zeros of v(.; Lambda) on (0, zeta_plus)."""
    _positive(Lambda)
    return Shooter(chart, rtol=rtol).count(Lambda)

