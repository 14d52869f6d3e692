"""
Eigenvalue search and mode assembly for the weighted problem

    -d/dz(rho dw/dz) + l^2 rho w = Lambda mu w,   w(0) = 0,   Lambda = 1/lambda.

Eigenvalues are indexed by the zero count of the shooting solution, bracketed
by bisection on that count, and refined on sign changes of the miss v(0).
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Tuple

import numpy as np
from scipy import optimize
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ...core.config import get_settings
from ...core.errors import InvalidArgumentError, ModeIdentificationError, NumericalError, SearchWindowError
from ...core.logging import get_logger, log_function_call
from ...models.spectrum import ModeSolution, SolverDiagnostics, Spectrum
from ..equilibrium.background import density
from ..liouville.chart import LiouvilleChart
from .profile import ModeProfile, printed_kappa
from .shooting import Shooter

logger = get_logger("services.spectrum.solver")

CAP_GROWTH_STEPS = 8


def _refine(shooter: Shooter, n: int, lo: float, hi: float, rtol: float) -> Tuple[float, int]:
    evaluations = 0

    def miss(Lambda: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return shooter.miss(Lambda)

    try:
        root = optimize.brentq(miss, lo, hi, xtol=1e-300, rtol=max(rtol, 4.0 * np.finfo(float).eps), maxiter=200)
    except ValueError as exc:
        raise ModeIdentificationError(f"no sign change of the miss in bracket {n}: [{lo!r}, {hi!r}]", n, -1) from exc
    return root, evaluations


def _refine_task(payload) -> Tuple[float, int]:
    eq, l, series_order, shooting_rtol, n, lo, hi, rtol = payload
    chart = LiouvilleChart(eq, l, series_order=series_order)
    return _refine(Shooter(chart, rtol=shooting_rtol), n, lo, hi, rtol)


class SpectrumSolver:
    """Bracketing and refinement of 1/lambda_1 < 1/lambda_2 < ... on one chart."""

    def __init__(self, chart: LiouvilleChart, shooting_rtol: float = None, workers: int = None):
        settings = get_settings()
        self.chart = chart
        self.shooting_rtol = shooting_rtol or settings.SHOOTING_RTOL
        self.workers = workers or settings.WORKERS
        self.shooter = Shooter(chart, rtol=self.shooting_rtol)
        self.diagnostics = SolverDiagnostics()
        self._counts: Dict[float, int] = {}

    def count(self, Lambda: float) -> int:
        if Lambda not in self._counts:
            self.diagnostics.count_evaluations += 1
            self._counts[Lambda] = self.shooter.count(Lambda)
        return self._counts[Lambda]

    def _bounds(self, n: int) -> Tuple[float, float]:
        hi = min(L for L, c in self._counts.items() if c >= n)
        lo = max(L for L, c in self._counts.items() if c < n and L < hi)
        return lo, hi

    def brackets(self, n_max: int) -> Dict[int, Tuple[float, float]]:
        """Intervals (lo, hi] holding exactly eigenvalue n, for n = 1..n_max."""
        if self.count(0.0) != 0:
            raise ModeIdentificationError(
                f"oscillation count at Lambda = 0 is {self._counts[0.0]}, expected 0", 1, self._counts[0.0]
            )

        cap = (4.0 * n_max * math.pi / self.chart.zeta_plus) ** 2
        for _ in range(CAP_GROWTH_STEPS):
            if self.count(cap) >= n_max:
                break
            cap *= 4.0
        else:
            raise SearchWindowError(f"fewer than {n_max} eigenvalues below the search cap", cap)
        self.diagnostics.cap = cap

        found = {}
        for n in range(1, n_max + 1):
            while True:
                lo, hi = self._bounds(n)
                if self._counts[lo] == n - 1 and self._counts[hi] == n:
                    break
                if hi - lo <= 1e-14 * hi:
                    raise ModeIdentificationError(f"eigenvalues {n - 1} and {n} could not be separated", n, self._counts[hi])
                self.count(0.5 * (lo + hi))
            found[n] = (lo, hi)
            self.diagnostics.brackets.append((n, lo, hi))
        logger.debug("Eigenvalue brackets", extra={"brackets": found, "count_evaluations": self.diagnostics.count_evaluations})
        return found

    def search(self, n_max: int, rtol: float) -> List[float]:
        found = self.brackets(n_max)
        if self.workers > 1 and n_max > 1:
            chart = self.chart
            payloads = [
                (chart.eq, chart.l, chart.series_order, self.shooting_rtol, n, lo, hi, rtol)
                for n, (lo, hi) in sorted(found.items())
            ]
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(_refine_task, payloads))
        else:
            results = [_refine(self.shooter, n, lo, hi, rtol) for n, (lo, hi) in sorted(found.items())]

        values = []
        for n, (value, evaluations) in enumerate(results, start=1):
            self.diagnostics.miss_evaluations += evaluations
            self.diagnostics.seed_offsets[n] = self.shooter.seed(value)[1]
            values.append(value)
        return values


def eigenvalues(chart: LiouvilleChart, n_max: int, rtol: float = None, workers: int = None,
                shooting_rtol: float = None) -> Spectrum:
    """The first n_max values 1/lambda_n, strictly increasing.

    Args:
        chart: Liouville chart of the background and wavenumber
        n_max: Number of eigenvalues, >= 1
        rtol: Relative bracket width of the refined values, >= 1e-12
        workers: Processes used for refinement

    Returns:
        Spectrum without modes
    """
    rtol = get_settings().EIGEN_RTOL if rtol is None else rtol
    if n_max < 1:
        raise InvalidArgumentError(f"n_max must be at least 1, got {n_max!r}", field="n_max")
    if rtol < 1e-12:
        raise InvalidArgumentError(f"rtol must be at least 1e-12, got {rtol!r}", field="rtol")
    return _eigenvalues(chart, n_max, rtol, workers, shooting_rtol)


def _eigenvalues(chart, n_max, rtol, workers, shooting_rtol) -> Spectrum:
    solver = SpectrumSolver(chart, shooting_rtol=shooting_rtol, workers=workers)
    try:
        values = solver.search(n_max, rtol)
    except NumericalError as exc:
        log_function_call("eigenvalues", {"n_max": n_max, "l": chart.l, "nu": chart.nu}, error=exc)
        raise
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ModeIdentificationError("eigenvalues are not strictly increasing", n_max, -1)
    logger.info("Eigenvalues found", extra={"n_max": n_max, "l": chart.l, "nu": chart.nu,
                                            "count_evaluations": solver.diagnostics.count_evaluations,
                                            "miss_evaluations": solver.diagnostics.miss_evaluations})
    return Spectrum(l=chart.l, inverse_lambdas=values, diagnostics=solver.diagnostics)


def eigenfunction(chart: LiouvilleChart, n: int, lambda_n: float, samples: int = None,
                  rtol: float = None, kappa: float = None) -> ModeSolution:
    """Assemble mode n: v on the zeta grid and w, u, deltaP on the z grid.

    `kappa` overrides the normalization constant (the default gives w(z_plus) = 1).

    Raises:
        ModeIdentificationError: zero count differs from n - 1
    """
    samples = samples or get_settings().DEFAULT_SAMPLES
    if n < 1:
        raise InvalidArgumentError(f"mode index must be at least 1, got {n!r}", field="n")
    if samples < 2:
        raise InvalidArgumentError(f"sample count must be at least 2, got {samples!r}", field="samples")
    if not lambda_n > 0.0:
        raise InvalidArgumentError(f"lambda_n must be positive, got {lambda_n!r}", field="lambda_n")

    result = Shooter(chart, rtol=rtol).integrate(1.0 / lambda_n, dense=True)
    zero_count = int(round(result.phase_end / math.pi)) - 1
    if zero_count != n - 1:
        raise ModeIdentificationError(
            f"mode {n} has {zero_count} interior zeros instead of {n - 1}", n, zero_count
        )
    profile = ModeProfile(chart, result, kappa=kappa)

    eq = chart.eq
    l = chart.l
    z = np.linspace(0.0, eq.z_plus, samples)
    t = np.sqrt(np.clip(eq.z_plus - z, 0.0, None))
    zeta = chart.zeta_plus - chart.offset_of_t(t)
    zeta[0], zeta[-1] = 0.0, chart.zeta_plus
    upsilon, _ = profile.state_t(t)
    w, dw, _ = profile.w_derivatives(z)
    u = dw / l
    deltaP = lambda_n / (l * l) * density(eq, z) * dw

    mode = ModeSolution(
        n=n, lambda_n=lambda_n, l=l, z=z, zeta=zeta, upsilon=upsilon, w=w, u=u, deltaP=deltaP,
        kappa_used=profile.kappa, kappa_printed=printed_kappa(chart), zero_count=zero_count,
        residual_norm=profile.tg_residual(),
        boundary_miss=abs(result.upsilon_end) / float(np.max(np.abs(upsilon))),
        u_vacuum=profile.dw_vacuum / l,
        profile=profile,
    )
    logger.debug("Mode assembled", extra={"n": n, "lambda_n": lambda_n, "residual_norm": mode.residual_norm})
    return mode


def compute_spectrum(chart: LiouvilleChart, n_max: int, rtol: float = None, samples: int = None,
                     workers: int = None, shooting_rtol: float = None) -> Spectrum:
    """Eigenvalues plus modes; a misidentified mode restarts the search with tighter tolerances."""
    settings = get_settings()
    base_rtol = settings.EIGEN_RTOL if rtol is None else rtol
    base_shooting = shooting_rtol or settings.SHOOTING_RTOL
    if n_max < 1:
        raise InvalidArgumentError(f"n_max must be at least 1, got {n_max!r}", field="n_max")

    retrying = Retrying(
        stop=stop_after_attempt(3),
        retry=retry_if_exception_type(ModeIdentificationError),
        reraise=True,
        before_sleep=lambda state: logger.warning(
            "Mode identification failed, tightening tolerances",
            extra={"attempt": state.attempt_number, "error": str(state.outcome.exception())},
        ),
    )
    for attempt in retrying:
        with attempt:
            k = attempt.retry_state.attempt_number - 1
            tol = max(base_rtol / 100.0 ** k, 1e-15)
            shoot_tol = max(base_shooting / 10.0 ** k, 1e-13)
            spectrum = _eigenvalues(chart, n_max, tol, workers, shoot_tol)
            spectrum.modes = [
                eigenfunction(chart, n, 1.0 / value, samples=samples, rtol=shoot_tol)
                for n, value in enumerate(spectrum.inverse_lambdas, start=1)
            ]
            spectrum.diagnostics.retries = k
    return spectrum


def dispersion(mode: ModeSolution) -> Tuple[float, float]:
    """(frequency, phase speed) = (sqrt(lambda), sqrt(lambda)/l)."""
    frequency = math.sqrt(mode.lambda_n)
    return frequency, frequency / mode.l


def mode_overlap(mode_m: ModeSolution, mode_n: ModeSolution) -> float:
    """int v_m v_n dzeta for unit-normalized v."""
    pm, pn = mode_m.profile, mode_n.profile
    t, weights = pm.quadrature() if pm.t_seed <= pn.t_seed else pn.quadrature()
    vm = pm.state_t(t)[0]
    vn = pn.state_t(t)[0]
    norm = math.sqrt(np.sum(weights * vm * vm) * np.sum(weights * vn * vn))
    return float(np.sum(weights * vm * vn) / norm)


def endpoint_exponent(mode: ModeSolution, lo: float = 1e-5, hi: float = 1e-3, points: int = 41) -> float:
    """Least-squares slope of log|v| against log(zeta_plus - zeta) on [lo, hi] * zeta_plus."""
    chart = mode.profile.chart
    x = np.geomspace(lo, hi, points) * chart.zeta_plus
    v = mode.profile.upsilon_of_offset(x)
    slope, _ = np.polyfit(np.log(x), np.log(np.abs(v)), 1)
    return float(slope)


def miss_derivative(chart: LiouvilleChart, Lambda: float, rel_step: float = 1e-6, rtol: float = None,
                    shooter: Shooter = None) -> float:
    """Central difference of the miss v(0) in Lambda."""
    shooter = shooter or Shooter(chart, rtol=rtol)
    h = rel_step * Lambda
    up, down = shooter.miss(Lambda + h), shooter.miss(Lambda - h)
    return (up - down) / (2.0 * h)


def simplicity_margin(chart: LiouvilleChart, Lambda: float, rel_step: float = 1e-3, rtol: float = None) -> float:
    """|miss'(Lambda)| h / max|miss(Lambda +- h)| with h = rel_step Lambda.

    Close to 1 at a simple root of the miss, close to 0 at a double one.
    """
    shooter = Shooter(chart, rtol=rtol)
    h = rel_step * Lambda
    slope = miss_derivative(chart, Lambda, shooter=shooter)
    spread = max(abs(shooter.miss(Lambda - h)), abs(shooter.miss(Lambda + h)))
    return abs(slope) * h / spread if spread > 0.0 else 0.0
