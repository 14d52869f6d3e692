"""
Liouville chart: the monotone map z <-> zeta, the potential q and the
endpoint data of the weighted problem

    -d/dz(rho dw/dz) + l^2 rho w = (1/lambda) mu w,   mu = -g l^2 drho/dz.

Internally everything is parametrized by t = sqrt(z_plus - z), in which the
map x(t) = zeta_plus - zeta is analytic:  dx/dt = 2 l sqrt(g) h(t) with
h = sqrt(Q(t^2)/P(t^2)).
"""
import math
from typing import NamedTuple, Tuple, Union

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import polynomial as npoly
from scipy import integrate, optimize

from ...core.config import get_settings
from ...core.errors import DomainError, InvalidArgumentError, SingularPointError
from ...core.logging import get_logger
from ...models.equilibrium import Equilibrium
from ..equilibrium.background import profile_polynomials
from . import series

logger = get_logger("services.liouville.chart")

ArrayLike = Union[float, np.ndarray]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(64)
_UNIT_NODES = 0.5 * (_GAUSS_NODES + 1.0)
_UNIT_WEIGHTS = 0.5 * _GAUSS_WEIGHTS


def singular_coefficient(nu: float) -> float:
    """K = (2nu-1)(2nu-3)/4, the coefficient of (zeta_plus - zeta)^-2 in q."""
    if not nu > 1.0:
        raise InvalidArgumentError(f"nu must exceed 1, got {nu!r}", field="nu")
    return (2.0 * nu - 1.0) * (2.0 * nu - 3.0) / 4.0


def _horner(coeffs: Tuple[float, ...], s):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


class LowerBound(NamedTuple):
    K0: float
    K1: float
    ok: bool


class LiouvilleChart:
    """Coordinate map and potential for one background and wavenumber."""

    def __init__(self, eq: Equilibrium, l: float, series_order: int = None, cache_size: int = None):
        if not (math.isfinite(l) and l > 0.0):
            raise InvalidArgumentError(f"l must be positive, got {l!r}", field="l")
        settings = get_settings()
        self.eq = eq
        self.l = float(l)
        self.nu = eq.nu
        self.g = eq.g
        self.z_plus = eq.z_plus
        self.t_plus = math.sqrt(eq.z_plus)
        self.K = singular_coefficient(eq.nu)
        self.series_order = series_order or settings.SEED_ORDER

        P, Q = profile_polynomials(eq)
        self._P = tuple(P)
        self._Q = tuple(Q)
        self._dP = tuple(npoly.polyder(P)) or (0.0,)
        self._dQ = tuple(npoly.polyder(Q)) or (0.0,)
        self._d2P = tuple(npoly.polyder(P, 2)) or (0.0,)
        self._d2Q = tuple(npoly.polyder(Q, 2)) or (0.0,)
        self._P_array = P
        self._Q_array = Q

        # dx/dt = speed_scale * h(t)
        self.speed_scale = 2.0 * self.l * math.sqrt(self.g)
        self.zeta_plus = self._offset_quad(self.t_plus)

        self._xi = self._fit_xi()
        self.map_cache = self._build_cache(cache_size or settings.MAP_CACHE_SIZE)
        self._build_series()

        logger.info(
            "Liouville chart ready",
            extra={"nu": self.nu, "l": self.l, "zeta_plus": self.zeta_plus, "K": self.K,
                   "xi_degree": self._xi.degree()},
        )

    # ------------------------------------------------------------------
    # profile terms in s = z_plus - z

    def _h(self, t):
        s = t * t
        return np.sqrt(_horner(self._Q, s) / _horner(self._P, s))

    def speed(self, t: float) -> float:
        """dx/dt at t (x = zeta_plus - zeta, t = sqrt(z_plus - z))."""
        s = t * t
        return self.speed_scale * math.sqrt(_horner(self._Q, s) / _horner(self._P, s))

    def speeds(self, t: ArrayLike) -> np.ndarray:
        return self.speed_scale * self._h(np.asarray(t, dtype=float))

    def log_derivatives(self, s):
        """P, Q and the logarithmic derivatives a = P'/P, b = Q'/Q with their s-derivatives."""
        Pv = _horner(self._P, s)
        Qv = _horner(self._Q, s)
        a = _horner(self._dP, s) / Pv
        b = _horner(self._dQ, s) / Qv
        da = _horner(self._d2P, s) / Pv - a * a
        db = _horner(self._d2Q, s) / Qv - b * b
        return Pv, Qv, a, b, da, db

    def q_of_s(self, s):
        """q at s = z_plus - z > 0 with the singular cancellation removed analytically.

        q = (rho/mu) [l^2 + 1/4 L'' - 1/16 L'^2 + 1/4 (log rho)' L'],
        L = log(-rho rho'); multiplying the bracket by s^2 leaves an analytic B(s).
        """
        Pv, Qv, a, b, da, db = self.log_derivatives(s)
        c = a + b
        m = 2.0 * self.nu - 1.0
        B = (self.l * self.l * s * s + 0.25 * self.K + s * (c + 2.0 * m * a) / 8.0
             + s * s * (0.25 * (da + db) - c * c / 16.0 + 0.25 * a * c))
        return Pv * B / (self.g * self.l * self.l * Qv * s)

    # ------------------------------------------------------------------
    # coordinate map

    def _offset_quad(self, t: float) -> float:
        """x(t) by adaptive quadrature, written as t * int_0^1 h(t u) du."""
        if t <= 0.0:
            return 0.0
        value, _ = integrate.quad(lambda u: float(self._h(t * u)), 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        return self.speed_scale * t * value

    def _xi_samples(self, s: np.ndarray) -> np.ndarray:
        # xi(s) = x(t)/t, t = sqrt(s); analytic in s
        t = np.sqrt(np.clip(s, 0.0, None))
        return self.speed_scale * (self._h(np.outer(t, _UNIT_NODES)) @ _UNIT_WEIGHTS)

    def _fit_xi(self) -> Chebyshev:
        fit = None
        for deg in (16, 32, 64, 128, 256):
            fit = Chebyshev.interpolate(self._xi_samples, deg, domain=[0.0, self.z_plus])
            coef = np.abs(fit.coef)
            if np.max(coef[-3:]) <= 1e-15 * np.max(coef):
                break
        return fit

    def offset_of_t(self, t: ArrayLike) -> ArrayLike:
        """x = zeta_plus - zeta as a function of t, relative-accurate down to t = 0."""
        t = np.asarray(t, dtype=float)
        out = t * self._xi(t * t)
        return out if out.ndim else float(out)

    def _build_cache(self, size: int) -> np.ndarray:
        k = np.arange(size)
        t = 0.5 * self.t_plus * (1.0 - np.cos(np.pi * k / (size - 1)))
        x = self.offset_of_t(t)
        x[0], x[-1] = 0.0, self.zeta_plus
        z = self.z_plus - t * t
        z[-1] = 0.0
        # columns: t, x, z, zeta (ascending in t)
        return np.column_stack((t, x, z, self.zeta_plus - x))

    def t_of_offset(self, x: float) -> float:
        """Inverse of offset_of_t via the cached table and a bracketed root solve."""
        if x <= 0.0:
            return 0.0
        if x >= self.zeta_plus:
            return self.t_plus
        t_tab, x_tab = self.map_cache[:, 0], self.map_cache[:, 1]
        i = int(np.searchsorted(x_tab, x))
        lo, hi = t_tab[max(i - 1, 0)], t_tab[min(i, t_tab.size - 1)]
        f = lambda t: self.offset_of_t(t) - x
        if f(lo) > 0.0:
            lo = 0.0
        if f(hi) < 0.0:
            hi = self.t_plus
        return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=200)

    def offset_of_z(self, z: float) -> float:
        """zeta_plus - zeta(z) without cancellation near z_plus."""
        self._check_z(z)
        return self._offset_quad(math.sqrt(self.z_plus - z))

    def _check_z(self, z: float) -> None:
        if not (0.0 <= z <= self.z_plus):
            raise DomainError(f"z must lie in [0, {self.z_plus!r}], got {z!r}", field="z")

    def _check_zeta(self, zeta: float) -> None:
        if not (0.0 <= zeta <= self.zeta_plus):
            raise DomainError(f"zeta must lie in [0, {self.zeta_plus!r}], got {zeta!r}", field="zeta")

    # ------------------------------------------------------------------
    # endpoint series

    def _build_series(self) -> None:
        """Power series at the vacuum endpoint.

        xi(s) = x/t, y(s) = x^2 = s xi^2, its reversion s(y), and the analytic
        x^2 q written in powers of y (q_series[0] = K).
        """
        n = self.series_order + 1
        P, Q = self._P_array, self._Q_array
        h = series.power(series.mul(Q, series.reciprocal(P, n), n), 0.5, n)
        self.xi_series = self.speed_scale * h / (2.0 * np.arange(n) + 1.0)
        xi_sq = series.mul(self.xi_series, self.xi_series, n)
        self.x2_of_s = series.shift(xi_sq, 1, n)
        self.s_of_x2 = series.revert(self.x2_of_s, n)

        a = series.mul(series.derivative(P, n), series.reciprocal(P, n), n)
        b = series.mul(series.derivative(Q, n), series.reciprocal(Q, n), n)
        c = a + b
        m = 2.0 * self.nu - 1.0
        tail = (0.25 * (series.derivative(a, n) + series.derivative(b, n)) - series.mul(c, c, n) / 16.0
                + 0.25 * series.mul(a, c, n))
        B = series.truncate([0.25 * self.K], n) + series.shift((c + 2.0 * m * a) / 8.0, 1, n) \
            + series.shift(tail, 2, n) + series.truncate([0.0, 0.0, self.l * self.l], n)
        H = series.mul(series.mul(xi_sq, P, n), series.mul(B, series.reciprocal(Q, n), n), n)
        H /= self.g * self.l * self.l
        self.q_series = series.compose(H, self.s_of_x2, n)

    # ------------------------------------------------------------------
    # public operations

    def zeta_of_z(self, z: float) -> float:
        """zeta(z) = int_0^z sqrt(mu/rho), with zeta(z_plus) = zeta_plus exactly."""
        self._check_z(z)
        if z == self.z_plus:
            return self.zeta_plus
        return self.zeta_plus - self._offset_quad(math.sqrt(self.z_plus - z))

    def z_of_zeta(self, zeta: float) -> float:
        self._check_zeta(zeta)
        if zeta == 0.0:
            return 0.0
        if zeta == self.zeta_plus:
            return self.z_plus
        t = self.t_of_offset(self.zeta_plus - zeta)
        return self.z_plus - t * t

    def q_of_zeta(self, zeta: float) -> float:
        self._check_zeta(zeta)
        x = self.zeta_plus - zeta
        if x <= 0.0:
            raise SingularPointError("q is singular at zeta_plus; use the endpoint series", field="zeta")
        t = self.t_of_offset(x)
        return float(self.q_of_s(t * t))

    def q_of_offset(self, x: float) -> float:
        """q as a function of x = zeta_plus - zeta > 0."""
        t = self.t_of_offset(x)
        return float(self.q_of_s(t * t))


def zeta_of_z(chart: LiouvilleChart, z: float) -> float:
    return chart.zeta_of_z(z)


def z_of_zeta(chart: LiouvilleChart, zeta: float) -> float:
    return chart.z_of_zeta(zeta)


def q_of_zeta(chart: LiouvilleChart, zeta: float) -> float:
    return chart.q_of_zeta(zeta)


def power_law_q(chart: LiouvilleChart, x: ArrayLike) -> ArrayLike:
    """Closed form of q for a pure power law: x^2/(4 l^2 nu^2 g^2) + K/x^2."""
    x = np.asarray(x, dtype=float)
    nu, g, l = chart.nu, chart.g, chart.l
    return x * x / (4.0 * l * l * nu * nu * g * g) + chart.K / (x * x)


def verify_lower_bound(chart: LiouvilleChart, grid_size: int) -> LowerBound:
    """Certificate q >= K0 + K1/(zeta_plus - zeta)^2 with K1 > -1/4.

    K1 = K - 1e-6 when K <= 0 and K1 = 0 otherwise; K0 is the grid minimum
    of q - K1/x^2 over zeta = zeta_plus * k / grid_size, k < grid_size.
    """
    if grid_size < 1000:
        raise InvalidArgumentError(f"grid size must be at least 1000, got {grid_size!r}", field="grid_size")
    K1 = chart.K - 1e-6 if chart.K <= 0.0 else 0.0
    zeta = chart.zeta_plus * np.arange(grid_size) / grid_size
    x = chart.zeta_plus - zeta
    t = np.array([chart.t_of_offset(v) for v in x])
    q = chart.q_of_s(t * t)
    K0 = float(np.min(q - K1 / (x * x)))
    ok = K1 > -0.25 and math.isfinite(K0)
    logger.debug("Lower bound certificate", extra={"K0": K0, "K1": K1, "ok": ok})
    return LowerBound(K0=K0, K1=K1, ok=ok)
