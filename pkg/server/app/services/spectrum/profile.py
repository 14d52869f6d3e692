"""
Continuous evaluation of one eigenfunction.

Away from the vacuum the transformed solution comes from the dense ODE
output and is mapped back through w = kappa (rho mu)^(-1/4) v with
chain-rule derivatives.  Near z_plus, where those formulas cancel, w is
evaluated from its Taylor series in s = z_plus - z, assembled from the
Frobenius coefficients; kappa makes that series start at exactly 1.
"""
import math
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from ...core.logging import get_logger
from ..frobenius.seed import series_value
from ..liouville import series
from ..liouville.chart import LiouvilleChart
from .shooting import ShootingResult

logger = get_logger("services.spectrum.profile")

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def gauss_panels(a: float, b: float, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite 16-point Gauss-Legendre nodes and weights on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def printed_kappa(chart: LiouvilleChart) -> float:
    """Normalization constant in the form usually quoted for this problem.

    It differs from the constant that actually gives w(z_plus) = 1 by the
    factor 2^(2 nu - 1).
    """
    eq = chart.eq
    nu, g, l = eq.nu, eq.g, chart.l
    return 2.0 ** ((2.0 * nu - 1.0) / 2.0) * (nu * g * l * l) ** (-(nu - 1.0) / 2.0) * math.sqrt(eq.C_rho)


class ModeProfile:
    """v(zeta) and w(z) with two z-derivatives for one eigenpair."""

    def __init__(self, chart: LiouvilleChart, result: ShootingResult, kappa: float = None):
        eq = chart.eq
        self.chart = chart
        self.Lambda = result.Lambda
        self.seed = result.seed
        self.t_seed = result.t_seed
        self.phase_end = result.phase_end
        self.upsilon_end = result.upsilon_end
        self._sol = result.solution
        self._norm = result.norm

        alpha = self.seed.alpha_plus
        self._amp = (eq.C_rho ** 2 * eq.g * chart.l ** 2) ** -0.25
        self.kappa_used = (eq.C_rho ** 2 * eq.g * chart.l ** 2 * eq.nu) ** 0.25 / chart.xi_series[0] ** alpha
        self.kappa = self.kappa_used if kappa is None else kappa

        n = self.seed.order + 1
        PQ = series.mul(chart._P_array, chart._Q_array, n)
        lead = series.mul(series.power(chart.xi_series, alpha, n), series.power(PQ, -0.25, n), n)
        S = series.compose(self.seed.coeffs, chart.x2_of_s, n)
        self.w_series = self.kappa * self._amp * series.mul(lead, S, n)
        self._dw_series = npoly.polyder(self.w_series)
        self._d2w_series = npoly.polyder(self.w_series, 2)

        last = abs(self.w_series[-1])
        reach = (1e-15 / last) ** (1.0 / (n - 1)) if last > 0.0 else np.inf
        self.s_series = max(min(reach, 0.05 * chart.z_plus), self.t_seed ** 2)

    # ------------------------------------------------------------------

    def state_t(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """(v, dv/dx) at t = sqrt(z_plus - z), x = zeta_plus - zeta."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        v = np.empty_like(t)
        dv = np.empty_like(t)
        inner = t < self.t_seed
        if np.any(inner):
            v[inner], dv[inner] = series_value(self.seed, self.chart.offset_of_t(t[inner]))
        outer = ~inner
        if np.any(outer):
            y = self._sol(t[outer])
            v[outer] = y[0] * self._norm
            dv[outer] = y[1] * self._norm
        return v, dv

    def upsilon_of_offset(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.array([self.chart.t_of_offset(float(v)) for v in x])
        return self.state_t(t)[0]

    def _from_transform(self, s: np.ndarray):
        """w, dw/dz, d2w/dz2 through the Liouville back-transform (s > 0)."""
        chart = self.chart
        eq = chart.eq
        nu, g, l = eq.nu, eq.g, chart.l
        t = np.sqrt(s)
        v, dv_dx = self.state_t(t)
        v_zeta = -dv_dx
        v_zz = (chart.q_of_s(s) - self.Lambda) * v

        Pv, Qv, a, b, da, db = chart.log_derivatives(s)
        m = 2.0 * nu - 1.0
        phi = self._amp * s ** (-m / 4.0) * (Pv * Qv) ** -0.25
        sigma = np.sqrt(g * l * l * Qv / (s * Pv))
        L1 = m / s + a + b
        L2 = -m / (s * s) + da + db
        dphi = 0.25 * L1
        d2phi = -0.25 * L2 + L1 * L1 / 16.0
        dsigma = 0.5 * sigma * (1.0 / s + a - b)

        k = self.kappa * phi
        w = k * v
        dw = k * (dphi * v + sigma * v_zeta)
        d2w = k * (d2phi * v + 2.0 * dphi * sigma * v_zeta + dsigma * v_zeta + sigma * sigma * v_zz)
        return w, dw, d2w

    def _from_series(self, s: np.ndarray):
        """w, dw/dz, d2w/dz2 from the endpoint Taylor series in s."""
        # d/dz = -d/ds
        return (npoly.polyval(s, self.w_series), -npoly.polyval(s, self._dw_series),
                npoly.polyval(s, self._d2w_series))

    def w_derivatives(self, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """w, dw/dz and d2w/dz2 at heights z in [0, z_plus]."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        s = np.clip(self.chart.z_plus - z, 0.0, None)
        w = np.empty_like(s)
        dw = np.empty_like(s)
        d2w = np.empty_like(s)

        near = s < self.s_series
        if np.any(near):
            w[near], dw[near], d2w[near] = self._from_series(s[near])
        far = ~near
        if np.any(far):
            w[far], dw[far], d2w[far] = self._from_transform(s[far])
        return w, dw, d2w

    def w(self, z) -> np.ndarray:
        return self.w_derivatives(z)[0]

    @property
    def dw_vacuum(self) -> float:
        """dw/dz at z_plus from the endpoint series."""
        return -float(self.w_series[1])

    # ------------------------------------------------------------------

    def tg_residual(self, panels: int = 64) -> float:
        """Relative residual of -(rho w')' + l^2 rho w - Lambda mu w in the 1/mu-weighted norm.

        The seed interval [0, t_seed] is covered by the endpoint series, the
        rest by the integrated solution.
        """
        chart = self.chart
        eq = chart.eq
        t_in, wt_in = gauss_panels(0.0, self.t_seed, 4)
        t_out, wt_out = gauss_panels(self.t_seed, chart.t_plus, panels)
        t = np.concatenate((t_in, t_out))
        wt = np.concatenate((wt_in, wt_out))
        s = t * t
        w_in, dw_in, d2w_in = self._from_series(s[: t_in.size])
        w_out, dw_out, d2w_out = self._from_transform(s[t_in.size:])
        w = np.concatenate((w_in, w_out))
        dw = np.concatenate((dw_in, dw_out))
        d2w = np.concatenate((d2w_in, d2w_out))
        Pv, Qv = chart.log_derivatives(s)[:2]
        rho = eq.C_rho * s ** eq.nu * Pv
        drho = -eq.C_rho * s ** (eq.nu - 1.0) * Qv
        mu = -eq.g * chart.l ** 2 * drho
        R = drho * dw + rho * d2w - chart.l ** 2 * self.Lambda * eq.g * drho * w - chart.l ** 2 * rho * w
        dz = 2.0 * t * wt
        num = np.sum(R * R / mu * dz)
        den = self.Lambda ** 2 * np.sum(mu * w * w * dz)
        return float(math.sqrt(num / den))

    def quadrature(self, panels: int = 96) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes in t and weights for integrals over zeta in [0, zeta_plus]."""
        chart = self.chart
        t_in, w_in = gauss_panels(0.0, self.t_seed, 2)
        t_out, w_out = gauss_panels(self.t_seed, chart.t_plus, panels)
        t = np.concatenate((t_in, t_out))
        # d zeta = -dx = -(dx/dt) dt, orientation absorbed
        return t, np.concatenate((w_in, w_out)) * chart.speeds(t)
