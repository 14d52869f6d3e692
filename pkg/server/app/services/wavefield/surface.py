"""
Motion of the vacuum boundary in Eulerian coordinates.

Type 1 keeps the Lagrangian top at z_plus.  For Type 2 the initial density
moves it to Z(x), the first height below z_plus where

    rho - eps (drho/dz) w sin(lx) = 0,

found by root solving s + sigma Q(s) w(z_plus - s) / P(s) = 0 in s = z_plus - z,
sigma = eps sin(lx).  Both surfaces invert x_eulerian = x + eps u (...) by
bracketed root finding, elementwise over the grid.
"""
import math
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import elementwise

from ...core.errors import AmplitudeError, InvalidArgumentError, ThresholdError
from ...core.logging import get_logger
from ...models.spectrum import ModeSolution
from ...models.wavefield import BoundarySurface, WaveKind
from ..equilibrium.background import profile_polynomials
from .fields import MAX_EPS_NU, _check_amplitude

logger = get_logger("services.wavefield.surface")


def _grids(t_grid: Sequence[float], x_grid: Sequence[float]):
    t = np.asarray(t_grid, dtype=float)
    x = np.asarray(x_grid, dtype=float)
    if t.ndim != 1 or x.ndim != 1 or t.size < 1 or x.size < 1:
        raise InvalidArgumentError("t_grid and x_grid must be non-empty one-dimensional grids", field="grid")
    return np.meshgrid(t, x, indexing="ij")


def _invert(f, target: np.ndarray, radius: np.ndarray, args=()) -> np.ndarray:
    res = elementwise.find_root(f, (target - radius, target + radius), args=(target, *args))
    if not np.all(res.success):
        bad = target[~res.success].ravel()
        raise ThresholdError(f"surface map could not be inverted at x = {bad[0]!r}", x=float(bad[0]))
    return res.x


def surface_type1(mode: ModeSolution, eps: float, t_grid: Sequence[float], x_grid: Sequence[float]) -> BoundarySurface:
    """z = z_plus + eps sin(l phi) sin(omega t), phi inverting x_e = x + eps u(z_plus) cos(lx) sin(omega t)."""
    _check_amplitude(eps, mode.profile.chart.nu, WaveKind.TYPE1)
    l, z_plus = mode.l, mode.profile.chart.z_plus
    omega = math.sqrt(mode.lambda_n)
    u_top = mode.u_vacuum
    if abs(eps * l * u_top) >= 1.0:
        raise AmplitudeError(f"|eps l u(z_plus)| = {abs(eps * l * u_top)!r} breaks monotonicity", field="eps")

    T, XE = _grids(t_grid, x_grid)
    swing = np.sin(omega * T)

    def f(x, target, sw):
        return x + eps * u_top * np.cos(l * x) * sw - target

    radius = abs(eps * u_top) + 1e-12 * (1.0 + np.abs(XE))
    phi = _invert(f, XE, radius, args=(swing,))

    surface = BoundarySurface(
        kind=WaveKind.TYPE1, eps=eps, t=T[:, 0].copy(), x=XE[0].copy(),
        exact=z_plus + eps * np.sin(l * phi) * swing,
        first_order=z_plus + eps * np.sin(l * XE) * swing,
    )
    logger.info("Type 1 surface", extra={"eps": eps, "n": mode.n, "deviation": surface.deviation()})
    return surface


def vacuum_top(mode: ModeSolution, eps: float, x) -> np.ndarray:
    """Top Z(x) of the Type 2 domain; z_plus wherever eps sin(lx) >= 0.

    Raises:
        ThresholdError: no sign change of the positivity condition below z_plus
    """
    profile = mode.profile
    chart = profile.chart
    if abs(eps) * chart.nu > MAX_EPS_NU:
        raise AmplitudeError(f"|eps| nu must not exceed {MAX_EPS_NU}", field="eps")
    P, Q = profile_polynomials(chart.eq)
    z_plus = chart.z_plus

    x = np.asarray(x, dtype=float)
    sigma = eps * np.sin(mode.l * x)
    top = np.full(x.shape, z_plus)
    active = sigma < 0.0
    if not np.any(active):
        return top

    def condition(s, sig):
        w = profile.w(z_plus - s.ravel()).reshape(s.shape)
        return s + sig * npoly.polyval(s, Q) * w / npoly.polyval(s, P)

    sig = sigma[active]
    hi = np.minimum(2.0 * chart.nu * np.abs(sig), z_plus)
    for _ in range(64):
        low = condition(hi, sig) <= 0.0
        if not np.any(low) or np.all(hi[low] >= z_plus):
            break
        hi[low] = np.minimum(2.0 * hi[low], z_plus)
    if np.any(condition(hi, sig) <= 0.0):
        bad = x[active][condition(hi, sig) <= 0.0]
        raise ThresholdError(f"no domain top found at x = {bad[0]!r}", x=float(bad[0]))

    res = elementwise.find_root(condition, (np.zeros_like(hi), hi), args=(sig,))
    if not np.all(res.success):
        bad = x[active][~res.success]
        raise ThresholdError(f"domain top root solve failed at x = {bad[0]!r}", x=float(bad[0]))
    top[active] = z_plus - res.x
    return top


def surface_type2(mode: ModeSolution, eps: float, t_grid: Sequence[float], x_grid: Sequence[float]) -> BoundarySurface:
    """Z(phi) + eps w(Z(phi)) [sin(l phi - omega t) - sin(l phi)] with the first-order
    traveling approximation z_plus + min(eps nu sin(l x), 0) + eps [sin(l x - omega t) - sin(l x)].
    """
    chart = mode.profile.chart
    _check_amplitude(eps, chart.nu, WaveKind.TYPE2)
    l, nu, z_plus = mode.l, chart.nu, chart.z_plus
    omega = math.sqrt(mode.lambda_n)
    profile = mode.profile

    T, XE = _grids(t_grid, x_grid)
    wt = omega * T

    lowest = float(np.min(vacuum_top(mode, eps, np.linspace(0.0, 2.0 * math.pi / l, 257))))
    z_scan = np.linspace(max(lowest - abs(eps), 0.0), z_plus, 257)
    u_bound = float(np.max(np.abs(profile.w_derivatives(z_scan)[1]))) / l

    def f(x, target, phase):
        shape = x.shape
        x = x.ravel()
        top = vacuum_top(mode, eps, x)
        u_top = profile.w_derivatives(top)[1] / l
        lx = l * x
        return (x + eps * u_top * (np.cos(lx - phase.ravel()) - np.cos(lx))).reshape(shape) - target

    radius = 2.2 * abs(eps) * u_bound + 1e-12 * (1.0 + np.abs(XE))
    phi = _invert(f, XE, radius, args=(wt,))

    flat = phi.ravel()
    top = vacuum_top(mode, eps, flat)
    w_top = profile.w(top)
    lphi = l * flat
    exact = (top + eps * w_top * (np.sin(lphi - wt.ravel()) - np.sin(lphi))).reshape(phi.shape)
    first_order = (
        z_plus + np.minimum(eps * nu * np.sin(l * XE), 0.0) + eps * (np.sin(l * XE - wt) - np.sin(l * XE))
    )

    surface = BoundarySurface(
        kind=WaveKind.TYPE2, eps=eps, t=T[:, 0].copy(), x=XE[0].copy(),
        exact=exact, first_order=first_order, static_top=vacuum_top(mode, eps, XE[0]),
    )
    logger.info("Type 2 surface", extra={"eps": eps, "n": mode.n, "deviation": surface.deviation()})
    return surface
