"""
Recessive Frobenius solution at the vacuum endpoint.

With x = zeta_plus - zeta and x^2 q(x) = sum_j Q_j x^(2j), Q_0 = K, the
solution of -v'' + (q - Lambda) v = 0 that vanishes fastest is

    v(x) = x^alpha (1 + a_1 x^2 + a_2 x^4 + ...),   alpha = (1 + sqrt(4K+1))/2.
"""
import math
from typing import Tuple

import numpy as np

from ...core.config import get_settings
from ...core.errors import InvalidArgumentError, ResonanceError, StepSizeError, UnsupportedSingularityError
from ...core.logging import get_logger
from ...models.spectrum import SingularSeed
from ..liouville.chart import LiouvilleChart

logger = get_logger("services.frobenius.seed")


def indicial_exponents(K: float) -> Tuple[float, float]:
    """Roots of alpha(alpha-1) = K, larger first."""
    disc = 4.0 * K + 1.0
    if disc <= 0.0:
        raise UnsupportedSingularityError(f"complex indicial exponents for K={K!r} (4K+1 <= 0)")
    root = math.sqrt(disc)
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def build_seed(chart: LiouvilleChart, Lambda: float, M: int = None) -> SingularSeed:
    """Series coefficients of the recessive solution for spectral parameter Lambda.

    Args:
        chart: Chart carrying the endpoint expansion of x^2 q up to order >= M
        Lambda: Spectral parameter 1/lambda (>= 0)
        M: Truncation order in powers of x^2

    Returns:
        SingularSeed with coeffs a_0 = 1, ..., a_M
    """
    M = get_settings().SEED_ORDER if M is None else M
    if M < 2:
        raise InvalidArgumentError(f"series order must be at least 2, got {M!r}", field="M")
    if M > chart.series_order:
        raise InvalidArgumentError(
            f"chart carries the potential series only up to order {chart.series_order}", field="M"
        )
    if not (math.isfinite(Lambda) and Lambda >= 0.0):
        raise InvalidArgumentError(f"Lambda must be finite and non-negative, got {Lambda!r}", field="Lambda")

    K = chart.K
    alpha_plus, alpha_minus = indicial_exponents(K)
    Q = chart.q_series
    a = np.zeros(M + 1)
    a[0] = 1.0
    for k in range(1, M + 1):
        denom = (alpha_plus + 2 * k) * (alpha_plus + 2 * k - 1) - K
        if abs(denom) < 1e-14:
            raise ResonanceError(f"vanishing recurrence denominator at k={k}")
        j = np.arange(1, k + 1)
        a[k] = (np.dot(Q[j], a[k - j]) - Lambda * a[k - 1]) / denom

    return SingularSeed(
        K=K, alpha_plus=alpha_plus, alpha_minus=alpha_minus, Lambda=Lambda,
        coeffs=tuple(float(c) for c in a), order=M,
    )


def series_value(seed: SingularSeed, x):
    """v and dv/dx of the truncated series at x >= 0 (vectorized)."""
    x = np.asarray(x, dtype=float)
    coeffs = np.asarray(seed.coeffs)
    y = x * x
    S = np.polynomial.polynomial.polyval(y, coeffs)
    dS = np.polynomial.polynomial.polyval(y, coeffs[1:] * np.arange(1, coeffs.size))
    alpha = seed.alpha_plus
    v = x ** alpha * S
    with np.errstate(divide="ignore", invalid="ignore"):
        dv = np.where(x > 0.0, x ** (alpha - 1.0) * (alpha * S + 2.0 * y * dS), 0.0 if alpha > 1.0 else np.inf)
    return v, dv


def seed_eval(seed: SingularSeed, delta: float, tol: float = None) -> Tuple[float, float]:
    """(v, dv/dzeta) at zeta = zeta_plus - delta.

    Raises:
        InvalidArgumentError: delta <= 0
        StepSizeError: certified remainder above tol at delta
    """
    tol = get_settings().SEED_REMAINDER_TOL if tol is None else tol
    if not delta > 0.0:
        raise InvalidArgumentError(f"seed offset must be positive, got {delta!r}", field="delta")
    remainder = seed.remainder(delta)
    if remainder > tol:
        suggested = 0.9 * delta * (tol / remainder) ** (1.0 / (2 * seed.order))
        raise StepSizeError(f"series remainder {remainder:.3e} exceeds {tol:.1e} at offset {delta!r}", suggested)
    v, dv_dx = series_value(seed, delta)
    # x = zeta_plus - zeta
    return float(v), -float(dv_dx)


def seed_offset(seed: SingularSeed, delta0: float, tol: float = None) -> float:
    """Largest delta0 / 2^k whose certified remainder is below tol."""
    tol = get_settings().SEED_REMAINDER_TOL if tol is None else tol
    delta = delta0
    for _ in range(60):
        if seed.remainder(delta) <= tol:
            return delta
        delta *= 0.5
    raise StepSizeError("no certified seed offset found", suggested=delta)
