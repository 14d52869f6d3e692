"""
Linearized standing vibrations (Type 1) and progressive waves (Type 2)
built from one eigenmode w_n, with the residuals of the reduced equations.

All evaluators take (t, x, z) broadcastable arrays in Lagrangian
coordinates and include the amplitude eps.
"""
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ...core.errors import AmplitudeError, InvalidArgumentError
from ...core.logging import get_logger
from ...models.spectrum import ModeSolution
from ...models.wavefield import ResidualReport, WaveKind
from ..equilibrium.background import density, density_gradient

logger = get_logger("services.wavefield.fields")

MAX_EPS = 0.1
MAX_EPS_NU = 0.2
# l times the x-step of the divergence stencil
X_STEP = 1e-3

COMPONENTS = ("xi1", "xi3", "delta_rho", "delta_P", "psi")


def _check_amplitude(eps: float, nu: float, kind: WaveKind) -> None:
    if not math.isfinite(eps) or abs(eps) > MAX_EPS:
        raise AmplitudeError(f"|eps| must not exceed {MAX_EPS}, got {eps!r}", field="eps")
    if kind == WaveKind.TYPE2 and abs(eps) * nu > MAX_EPS_NU:
        raise AmplitudeError(
            f"|eps| nu = {abs(eps) * nu!r} exceeds {MAX_EPS_NU}; the domain top is not resolvable", field="eps"
        )


@dataclass(frozen=True)
class WaveField:
    mode: ModeSolution
    kind: WaveKind
    eps: float
    lambda_n: float

    @property
    def l(self) -> float:
        return self.mode.l

    @property
    def omega(self) -> float:
        return math.sqrt(self.lambda_n)

    @property
    def eq(self):
        return self.mode.profile.chart.eq

    def with_frequency(self, lambda_n: float) -> "WaveField":
        """Same mode shape driven at another lambda (residual sensitivity)."""
        return replace(self, lambda_n=lambda_n)

    def vertical(self, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """w, dw/dz, d2w/dz2 at z (any shape)."""
        z = np.asarray(z, dtype=float)
        w, dw, d2w = self.mode.profile.w_derivatives(z.ravel())
        return w.reshape(z.shape), dw.reshape(z.shape), d2w.reshape(z.shape)

    def _phases(self, t, x):
        """Horizontal-temporal factors multiplying u and w."""
        lx = self.l * np.asarray(x, dtype=float)
        wt = self.omega * np.asarray(t, dtype=float)
        if self.kind == WaveKind.TYPE1:
            return np.cos(lx) * np.sin(wt), np.sin(lx) * np.sin(wt)
        return np.cos(lx - wt) - np.cos(lx), np.sin(lx - wt) - np.sin(lx)

    def xi1(self, t, x, z) -> np.ndarray:
        _, dw, _ = self.vertical(z)
        return self.eps * dw / self.l * self._phases(t, x)[0]

    def xi3(self, t, x, z) -> np.ndarray:
        w, _, _ = self.vertical(z)
        return self.eps * w * self._phases(t, x)[1]

    def delta_P(self, t, x, z) -> np.ndarray:
        _, dw, _ = self.vertical(z)
        dP = self.mode.lambda_n / self.l ** 2 * density(self.eq, z) * dw
        return self.eps * dP * self._phases(t, x)[1]

    def delta_rho(self, t, x, z) -> np.ndarray:
        w, _, _ = self.vertical(z)
        lx = self.l * np.asarray(x, dtype=float)
        wt = self.omega * np.asarray(t, dtype=float)
        phase = np.sin(lx) * np.sin(wt) if self.kind == WaveKind.TYPE1 else np.sin(lx - wt)
        return -self.eps * density_gradient(self.eq, z) * w * phase

    def psi(self, t, x, z) -> np.ndarray:
        """Stream function: xi1 = dpsi/dz, xi3 = -dpsi/dx."""
        w, _, _ = self.vertical(z)
        return self.eps / self.l * w * self._phases(t, x)[0]

    def delta_rho_initial(self, x, z) -> np.ndarray:
        """[l rho u - d(rho w)/dz] sin lx for Type 2; zero for Type 1."""
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.kind == WaveKind.TYPE1:
            return np.zeros(np.broadcast(x, z).shape)
        w, dw, _ = self.vertical(z)
        rho = density(self.eq, z)
        u = dw / self.l
        return self.eps * (self.l * rho * u - (density_gradient(self.eq, z) * w + rho * dw)) * np.sin(self.l * x)

    def static_offset(self, component: str, x, z) -> np.ndarray:
        """t-independent part of a Type 2 component; the rest depends on lx - omega t only."""
        if component not in COMPONENTS:
            raise InvalidArgumentError(f"unknown component {component!r}", field="component")
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.kind == WaveKind.TYPE1 or component == "delta_rho":
            return np.zeros(np.broadcast(x, z).shape)
        w, dw, _ = self.vertical(z)
        lx = self.l * x
        if component == "xi1":
            return -self.eps * dw / self.l * np.cos(lx)
        if component == "xi3":
            return -self.eps * w * np.sin(lx)
        if component == "psi":
            return -self.eps / self.l * w * np.cos(lx)
        dP = self.mode.lambda_n / self.l ** 2 * density(self.eq, z) * dw
        return -self.eps * dP * np.sin(lx)

    def dxi1_dx(self, t, x, z) -> np.ndarray:
        """Five-point central difference of xi1 in x."""
        h = X_STEP / self.l
        x = np.asarray(x, dtype=float)
        return (self.xi1(t, x - 2.0 * h, z) - 8.0 * self.xi1(t, x - h, z)
                + 8.0 * self.xi1(t, x + h, z) - self.xi1(t, x + 2.0 * h, z)) / (12.0 * h)

    def dxi3_dz(self, t, x, z) -> np.ndarray:
        _, dw, _ = self.vertical(z)
        return self.eps * dw * self._phases(t, x)[1]

    def divergence(self, t, x, z) -> np.ndarray:
        """d(xi1)/dx + d(xi3)/dz, the x-derivative taken numerically from xi1 itself."""
        return self.dxi1_dx(t, x, z) + self.dxi3_dz(t, x, z)


def type1_field(mode: ModeSolution, eps: float) -> WaveField:
    """Standing vibration with delta_rho(t = 0) = 0."""
    _check_amplitude(eps, mode.profile.chart.nu, WaveKind.TYPE1)
    return WaveField(mode=mode, kind=WaveKind.TYPE1, eps=eps, lambda_n=mode.lambda_n)


def type2_field(mode: ModeSolution, eps: float) -> WaveField:
    """Progressive wave with phase speed sqrt(lambda)/l.

    Raises:
        AmplitudeError: |eps| > 0.1 or |eps| nu > 0.2
    """
    _check_amplitude(eps, mode.profile.chart.nu, WaveKind.TYPE2)
    return WaveField(mode=mode, kind=WaveKind.TYPE2, eps=eps, lambda_n=mode.lambda_n)


def _ratio(residual: np.ndarray, *terms: np.ndarray) -> float:
    """Largest pointwise |residual| over the sum of term magnitudes at the same point."""
    scale = sum(np.abs(term) for term in terms)
    live = scale > 0.0
    if not np.any(live):
        return 0.0
    return float(np.max(np.abs(residual[live]) / scale[live]))


def _global_ratio(residual: np.ndarray, *terms: np.ndarray) -> float:
    scale = float(np.max(sum(np.abs(term) for term in terms)))
    return float(np.max(np.abs(residual))) / scale if scale > 0.0 else 0.0


def residual_linear(field: WaveField, samples: int = 1000, seed: int = 0) -> ResidualReport:
    """Maximum residuals of the reduced equations over random sample points.

    Each momentum residual is divided pointwise by the sum of its term
    magnitudes; the divergence is relative to its largest term.
    """
    if samples < 1:
        raise InvalidArgumentError(f"sample count must be positive, got {samples!r}", field="samples")
    eq = field.eq
    l, g = field.l, eq.g
    lam = field.lambda_n
    lam_mode = field.mode.lambda_n

    rng = np.random.default_rng(seed)
    z = rng.uniform(0.0, eq.z_plus, samples)
    x = rng.uniform(0.0, 2.0 * math.pi / l, samples)
    t = rng.uniform(0.0, 2.0 * math.pi / field.omega, samples)

    w, dw, d2w = field.vertical(z)
    u = dw / l
    rho = density(eq, z)
    drho = density_gradient(eq, z)
    ratio = drho / rho
    # deltaP / rho and (d deltaP/dz) / rho, expanded analytically
    dP_over_rho = lam_mode / l ** 2 * dw
    ddP_over_rho = lam_mode / l ** 2 * (ratio * dw + d2w)

    continuity = _ratio(-l * u + dw, l * u, dw)
    horizontal = _ratio(-lam * u + l * dP_over_rho, lam * u, l * dP_over_rho)
    vertical = _ratio(-lam * w - g * ratio * w + ddP_over_rho, lam * w, g * ratio * w, ddP_over_rho)

    # rho psi_tt,xx+zz + rho' psi_tt,z - g rho' psi_xx - g d(delta_rho_0)/dx = 0
    lx = l * x
    wt = field.omega * t
    eps = field.eps
    if field.kind == WaveKind.TYPE1:
        travel = np.cos(lx) * np.sin(wt)
        psi_xx = -l * l * eps / l * w * travel
        forcing = np.zeros_like(z)
    else:
        travel = np.cos(lx - wt)
        psi_xx = eps / l * w * (-l * l * travel + l * l * np.cos(lx))
        forcing = -g * eps * (l * rho * u - (drho * w + rho * dw)) * l * np.cos(lx)
    inertia = rho * (-lam) * eps / l * (d2w - l * l * w) * travel
    shear = drho * (-lam) * eps / l * dw * travel
    buoyancy = -g * drho * psi_xx
    stream = _ratio(inertia + shear + buoyancy + forcing, inertia, shear, buoyancy, forcing)

    dxi1 = field.dxi1_dx(t, x, z)
    dxi3 = field.dxi3_dz(t, x, z)
    divergence = _global_ratio(dxi1 + dxi3, dxi1, dxi3)

    report = ResidualReport(
        samples=samples, continuity=continuity, horizontal_momentum=horizontal,
        vertical_momentum=vertical, stream_function=stream, divergence=divergence,
    )
    logger.debug("Linear residuals", extra={"kind": field.kind.value, **report.as_dict()})
    return report
