"""
Barotropic background state touching vacuum at z = z_plus.

With s = z_plus - z the density is rho = C s^nu P(s), P(s) = 1 + c1 s + ...,
and the (negated) gradient is -drho/dz = C s^(nu-1) Q(s), Q = nu P + s P'.
Every derived quantity is written in terms of P and Q so that no
derivative is ever finite-differenced.
"""
import math
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from ...core.config import get_settings
from ...core.errors import InvalidArgumentError, InvalidProfileError, OutOfSupportError, DomainError
from ...core.logging import get_logger
from ...models.equilibrium import Equilibrium, BackgroundSample

logger = get_logger("services.equilibrium.background")

ArrayLike = Union[float, np.ndarray]

PROFILE_GRID_POINTS = 10_000


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise InvalidArgumentError(message, field=field)


def make_polytropic(gamma: float, A: float, g: float, z_plus: float) -> Equilibrium:
    """Build the pure power-law background of P = A rho^gamma.

    Args:
        gamma: Adiabatic exponent, 1 < gamma < 2
        A: Entropy constant, > 0
        g: Gravity, > 0
        z_plus: Vacuum height, finite and > 0

    Returns:
        Equilibrium with nu = 1/(gamma-1) and C = ((gamma-1) g / (A gamma))^nu
    """
    _require(math.isfinite(gamma) and 1.0 < gamma < 2.0, "gamma", f"gamma must satisfy 1 < gamma < 2, got {gamma!r}")
    _require(math.isfinite(A) and A > 0.0, "A", f"A must be positive, got {A!r}")
    _require(math.isfinite(g) and g > 0.0, "g", f"g must be positive, got {g!r}")
    _require(math.isfinite(z_plus) and z_plus > 0.0, "z_plus", f"z_plus must be finite and positive, got {z_plus!r}")

    nu = 1.0 / (gamma - 1.0)
    C_rho = ((gamma - 1.0) * g / (A * gamma)) ** nu
    logger.debug("Polytropic background", extra={"gamma": gamma, "nu": nu, "C_rho": C_rho})
    return Equilibrium(gamma=gamma, A=A, g=g, z_plus=z_plus, nu=nu, C_rho=C_rho)


def profile_polynomials(eq: Equilibrium) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficient arrays (ascending powers of s) of P and Q = nu P + s P'."""
    P = np.concatenate(([1.0], np.asarray(eq.lambda_series, dtype=float)))
    Q = (eq.nu + np.arange(P.size)) * P
    return P, Q


def _s(eq: Equilibrium, z: ArrayLike) -> np.ndarray:
    return eq.z_plus - np.asarray(z, dtype=float)


def density(eq: Equilibrium, z: ArrayLike) -> ArrayLike:
    """rho(z); zero at and above z_plus."""
    P, _ = profile_polynomials(eq)
    s = _s(eq, z)
    inside = s > 0.0
    sp = np.where(inside, s, 1.0)
    out = np.where(inside, eq.C_rho * sp ** eq.nu * npoly.polyval(sp, P), 0.0)
    return out if out.ndim else float(out)


def density_gradient(eq: Equilibrium, z: ArrayLike) -> ArrayLike:
    """drho/dz = -C s^(nu-1) Q(s); zero at and above z_plus."""
    _, Q = profile_polynomials(eq)
    s = _s(eq, z)
    inside = s > 0.0
    sp = np.where(inside, s, 1.0)
    out = np.where(inside, -eq.C_rho * sp ** (eq.nu - 1.0) * npoly.polyval(sp, Q), 0.0)
    return out if out.ndim else float(out)


def _pressure_antiderivative(eq: Equilibrium, s: float) -> float:
    """g * int_0^s C sigma^nu P(sigma) dsigma, summed term by term."""
    if s <= 0.0:
        return 0.0
    P, _ = profile_polynomials(eq)
    k = np.arange(P.size)
    return float(eq.g * eq.C_rho * np.sum(P * s ** (eq.nu + k + 1.0) / (eq.nu + k + 1.0)))


def _pressure_scalar(eq: Equilibrium, z: float) -> float:
    s = eq.z_plus - z
    if s <= 0.0:
        return 0.0
    if eq.is_power_law:
        return eq.A * float(density(eq, z)) ** eq.gamma

    P, _ = profile_polynomials(eq)
    value, _ = integrate.quad(
        lambda sigma: sigma ** eq.nu * npoly.polyval(sigma, P),
        0.0, s, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return eq.g * eq.C_rho * value


def pressure(eq: Equilibrium, z: ArrayLike) -> ArrayLike:
    """P(z) anchored at P(z_plus) = 0 and balancing dP/dz = -g rho.

    Pure power laws use A rho^gamma; perturbed profiles integrate g rho
    downward from the vacuum height.
    """
    zz = np.asarray(z, dtype=float)
    if zz.ndim == 0:
        return _pressure_scalar(eq, float(zz))
    return np.array([_pressure_scalar(eq, float(v)) for v in zz.ravel()]).reshape(zz.shape)


def eval_background(eq: Equilibrium, z: float, with_buoyancy: bool = True) -> BackgroundSample:
    """Evaluate the background at one height.

    Args:
        eq: Background state
        z: Height, z >= 0
        with_buoyancy: Also compute N^2 and the scale height, which needs z < z_plus

    Returns:
        BackgroundSample

    Raises:
        OutOfSupportError: buoyancy requested at or above z_plus
    """
    if not math.isfinite(z) or z < 0.0:
        raise DomainError(f"z must be finite and non-negative, got {z!r}", field="z")
    if with_buoyancy and z >= eq.z_plus:
        raise OutOfSupportError(
            f"N_sq and scale_height are undefined for z >= z_plus={eq.z_plus!r} (z={z!r})", field="z"
        )

    rho = float(density(eq, z))
    drho = float(density_gradient(eq, z))
    N_sq = scale_height = None
    if with_buoyancy:
        P, Q = profile_polynomials(eq)
        s = eq.z_plus - z
        # -rho'/rho = Q/(s P) avoids the ratio of two small numbers near z_plus
        N_sq = eq.g * float(npoly.polyval(s, Q) / (s * npoly.polyval(s, P)))
        scale_height = eq.g / N_sq
    return BackgroundSample(
        z=z, rho=rho, drho=drho, pressure=_pressure_scalar(eq, z), N_sq=N_sq, scale_height=scale_height
    )


def weight_mu(eq: Equilibrium, l: float, z: ArrayLike) -> ArrayLike:
    """Weight mu = -g l^2 drho/dz of the weighted eigenproblem."""
    _require(l > 0.0, "l", f"l must be positive, got {l!r}")
    zz = np.asarray(z, dtype=float)
    if np.any(zz < 0.0) or np.any(zz > eq.z_plus):
        raise DomainError(f"z must lie in [0, {eq.z_plus!r}]", field="z")
    return -eq.g * l * l * density_gradient(eq, z)


def sound_speed_sq(eq: Equilibrium, z: ArrayLike) -> ArrayLike:
    """dP/drho = g * H = g s P(s)/Q(s), vanishing linearly at the vacuum."""
    P, Q = profile_polynomials(eq)
    s = np.clip(_s(eq, z), 0.0, None)
    out = eq.g * s * npoly.polyval(s, P) / npoly.polyval(s, Q)
    return out if np.ndim(out) else float(out)


def vacuum_slope(eq: Equilibrium) -> float:
    """d(dP/drho)/dz at z_plus - 0.

    dP/drho = g s P/Q, so its z-derivative at s = 0 is -g P(0)/Q(0) = -g/nu
    whatever the correction series.
    """
    P, Q = profile_polynomials(eq)
    dPdrho = npoly.polymul([0.0, eq.g], P)
    # d/ds (s P / Q) at s = 0 reduces to the ratio of the leading coefficients
    return -float(dPdrho[1] / Q[0])


def make_perturbed(eq: Equilibrium, coeffs: Sequence[float]) -> Equilibrium:
    """Attach the correction 1 + c1 s + c2 s^2 + ... to a power-law background.

    The coefficients replace any correction already carried by `eq`.

    Raises:
        InvalidArgumentError: too many coefficients
        InvalidProfileError: density not positive and decreasing on [0, z_plus)
    """
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        return eq
    max_terms = get_settings().MAX_SERIES_TERMS
    _require(len(coeffs) <= max_terms, "lambda_series", f"at most {max_terms} correction coefficients are supported")
    _require(all(math.isfinite(c) for c in coeffs), "lambda_series", "correction coefficients must be finite")

    candidate = eq.model_copy(update={"lambda_series": coeffs})
    P, Q = profile_polynomials(candidate)
    z_grid = np.linspace(0.0, eq.z_plus, PROFILE_GRID_POINTS, endpoint=False)
    s_grid = eq.z_plus - z_grid
    bad = (npoly.polyval(s_grid, P) <= 0.0) | (npoly.polyval(s_grid, Q) <= 0.0)
    if np.any(bad):
        z_bad = float(z_grid[np.argmax(bad)])
        logger.warning("Rejected correction series", extra={"coeffs": coeffs, "z": z_bad})
        raise InvalidProfileError("density must stay positive and strictly decreasing below z_plus", z=z_bad)

    logger.debug("Perturbed background", extra={"coeffs": coeffs})
    return candidate


def hydrostatic_residual(eq: Equilibrium, n: int = 1000) -> float:
    """max |P(z) - g int_z^z_plus rho| / (g rho(0) z_plus) over n heights.

    The reference integral is the exact term-wise antiderivative, so a small
    value certifies dP/dz = -g rho for the evaluated pressure.
    """
    z_grid = np.linspace(0.0, eq.z_plus, n)
    scale = eq.g * float(density(eq, 0.0)) * eq.z_plus
    worst = 0.0
    for z in z_grid:
        exact = _pressure_antiderivative(eq, eq.z_plus - z)
        worst = max(worst, abs(_pressure_scalar(eq, float(z)) - exact))
    return worst / scale
