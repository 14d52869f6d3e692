"""
Invariant suite behind `validate`.

Every check returns a CheckResult {check_name, status, measured, tolerance};
a check that raises is reported as an error instead of aborting the run.
"""
import math
from functools import cached_property
from typing import Callable, List, Optional

import numpy as np

from ...core.errors import GravityModesError
from ...core.logging import get_logger
from ...models.report import CheckResult, CheckStatus, ValidationReport
from ...models.run_config import RunConfig
from ...models.spectrum import ModeSolution, Spectrum
from ...models.wavefield import WaveKind
from ..equilibrium.background import hydrostatic_residual, sound_speed_sq, vacuum_slope, weight_mu
from ..fd_oracle.discretization import (
    assemble, convergence_order, eigenvalues_fd, eigenvectors_fd, oracle_lambdas, sturm_count,
)
from ..frobenius.seed import build_seed, indicial_exponents
from ..liouville.chart import LiouvilleChart, power_law_q, verify_lower_bound
from ..pipeline import chart_from_config, equilibrium_from_config, spectrum_from_config, surface_grids
from ..spectrum.profile import printed_kappa
from ..spectrum.shooting import Shooter
from ..spectrum.solver import eigenfunction, eigenvalues, endpoint_exponent, mode_overlap, simplicity_margin
from ..wavefield.fields import residual_linear, type1_field, type2_field
from ..wavefield.surface import surface_type1, surface_type2, vacuum_top

logger = get_logger("services.validation.suite")

SURFACE_EPS = (1e-2, 5e-3)
SMALL_CELLS = 2000


def _upper(name: str, measured: float, tolerance: float, detail: str = None) -> CheckResult:
    ok = math.isfinite(measured) and measured <= tolerance
    return CheckResult(check_name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL,
                       measured=float(measured), tolerance=tolerance, detail=detail)


def _lower(name: str, measured: float, tolerance: float, detail: str = None) -> CheckResult:
    ok = math.isfinite(measured) and measured >= tolerance
    return CheckResult(check_name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL,
                       measured=float(measured), tolerance=tolerance, detail=detail)


def _band(name: str, measured: float, lo: float, hi: float) -> CheckResult:
    ok = math.isfinite(measured) and lo <= measured <= hi
    return CheckResult(check_name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL,
                       measured=float(measured), tolerance=hi, detail=f"expected within [{lo}, {hi}]")


def _sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values[np.abs(values) > 1e-12 * np.max(np.abs(values))])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


class ValidationSuite:
    """Runs every named check on the background and wavenumber of one RunConfig."""

    def __init__(self, config: RunConfig):
        self.config = config
        self._spectrum: Optional[Spectrum] = None
        self._spectrum_error: Optional[GravityModesError] = None

    # ------------------------------------------------------------------
    # shared, lazily computed state

    @cached_property
    def eq(self):
        return equilibrium_from_config(self.config)

    @cached_property
    def chart(self) -> LiouvilleChart:
        return chart_from_config(self.config, self.eq)

    @property
    def spectrum(self) -> Spectrum:
        # a failed search is reported once per dependent check, not recomputed
        if self._spectrum_error is not None:
            raise self._spectrum_error
        if self._spectrum is None:
            try:
                self._spectrum = self._compute_spectrum()
            except GravityModesError as e:
                self._spectrum_error = e
                raise
        return self._spectrum

    def _compute_spectrum(self) -> Spectrum:
        spectrum = spectrum_from_config(self.config, self.chart)
        if self.config.inject_fault == "kappa":
            logger.warning("Injecting the printed normalization constant into every mode")
            kappa = printed_kappa(self.chart)
            spectrum.modes = [
                eigenfunction(self.chart, mode.n, mode.lambda_n, samples=self.config.samples,
                              rtol=self.config.shooting_tol, kappa=kappa)
                for mode in spectrum.modes
            ]
        return spectrum

    @property
    def modes(self) -> List[ModeSolution]:
        return self.spectrum.modes

    @cached_property
    def oracle(self):
        return oracle_lambdas(self.eq, self.config.l, self.config.oracle_cells, self.config.n_max)

    @cached_property
    def small_problem(self):
        return assemble(self.eq, self.config.l, SMALL_CELLS)

    @cached_property
    def surface_deviation(self):
        mode = self.modes[0]
        t, x = surface_grids(self.config, mode.lambda_n)
        out = {}
        for kind, build in ((WaveKind.TYPE1, surface_type1), (WaveKind.TYPE2, surface_type2)):
            out[kind] = [build(mode, eps, t, x) for eps in SURFACE_EPS]
        return out

    # ------------------------------------------------------------------
    # equilibrium

    def check_hydrostatic(self) -> CheckResult:
        return _upper("equilibrium.hydrostatic_balance", hydrostatic_residual(self.eq, 200), 1e-12)

    def check_vacuum_slope(self) -> CheckResult:
        h = 1e-6 * self.eq.z_plus
        z_plus = self.eq.z_plus
        slope = (sound_speed_sq(self.eq, z_plus - h) - sound_speed_sq(self.eq, z_plus - 2.0 * h)) / h
        return _upper("equilibrium.vacuum_slope", abs(slope - vacuum_slope(self.eq)) / abs(vacuum_slope(self.eq)), 1e-4)

    def check_weight_positive(self) -> CheckResult:
        z = np.linspace(0.0, self.eq.z_plus, 1001)[:-1]
        bad = int(np.count_nonzero(weight_mu(self.eq, self.config.l, z) <= 0.0))
        return _upper("equilibrium.weight_positive", bad, 0)

    # ------------------------------------------------------------------
    # liouville

    def check_map_roundtrip(self) -> CheckResult:
        chart = self.chart
        z = np.linspace(0.0, chart.z_plus, 201)
        err = max(abs(chart.z_of_zeta(chart.zeta_of_z(float(v))) - v) for v in z)
        return _upper("liouville.map_roundtrip", err, 1e-10)

    def check_map_monotone(self) -> CheckResult:
        chart = self.chart
        zeta = [chart.zeta_of_z(float(v)) for v in np.linspace(0.0, chart.z_plus, 401)]
        return _upper("liouville.map_monotone", int(np.count_nonzero(np.diff(zeta) <= 0.0)), 0)

    def check_q_closed_form(self) -> Optional[CheckResult]:
        chart = self.chart
        if not self.eq.is_power_law:
            return None
        x = np.geomspace(1e-3, 1.0, 200) * chart.zeta_plus
        q = np.array([chart.q_of_offset(float(v)) for v in x])
        exact = power_law_q(chart, x)
        return _upper("liouville.q_closed_form", float(np.max(np.abs(q - exact) / np.abs(exact))), 1e-9)

    def check_lower_bound(self) -> CheckResult:
        bound = verify_lower_bound(self.chart, 2000)
        return _lower("liouville.lower_bound_K1", bound.K1, -0.25 + 1e-12, detail=f"K0 = {bound.K0!r}")

    # ------------------------------------------------------------------
    # frobenius

    def check_indicial(self) -> CheckResult:
        alpha, _ = indicial_exponents(self.chart.K)
        return _upper("frobenius.indicial_exponent", abs(alpha - (2.0 * self.chart.nu - 1.0) / 2.0), 1e-12)

    def check_seed_residual(self) -> CheckResult:
        chart = self.chart
        Lambda = self.spectrum.inverse_lambdas[0]
        seed = build_seed(chart, Lambda)
        delta = Shooter(chart).seed(Lambda)[1]
        worst = 0.0
        for x in (delta, 0.5 * delta):
            k = np.arange(len(seed.coeffs))
            powers = seed.alpha_plus + 2.0 * k
            coeffs = np.asarray(seed.coeffs)
            v = float(np.sum(coeffs * x ** powers))
            d2v = float(np.sum(coeffs * powers * (powers - 1.0) * x ** (powers - 2.0)))
            q = chart.q_of_offset(x)
            worst = max(worst, abs(-d2v + (q - Lambda) * v) / (abs(d2v) + abs(q * v) + abs(Lambda * v)))
        return _upper("frobenius.seed_residual", worst, 1e-12)

    # ------------------------------------------------------------------
    # spectrum

    def check_increasing(self) -> CheckResult:
        values = np.asarray(self.spectrum.inverse_lambdas)
        return _upper("spectrum.strictly_increasing", int(np.count_nonzero(np.diff(values) <= 0.0)), 0)

    def check_zero_counts(self) -> CheckResult:
        bad = sum(1 for mode in self.modes if mode.zero_count != mode.n - 1)
        return _upper("spectrum.zero_counts", bad, 0)

    def check_normalization(self) -> CheckResult:
        return _upper("spectrum.vacuum_normalization", max(abs(mode.w[-1] - 1.0) for mode in self.modes), 1e-9)

    def check_ground(self) -> CheckResult:
        return _upper("spectrum.ground_condition",
                      max(abs(mode.w[0]) / float(np.max(np.abs(mode.w))) for mode in self.modes), 1e-8)

    def check_u_derivative(self) -> CheckResult:
        worst = 0.0
        for mode in self.modes:
            numeric = np.gradient(mode.w, mode.z, edge_order=2) / mode.l
            worst = max(worst, float(np.max(np.abs(numeric - mode.u)) / np.max(np.abs(mode.u))))
        return _upper("spectrum.u_matches_dw", worst, 1e-2)

    def check_tg_residual(self) -> CheckResult:
        return _upper("spectrum.tg_residual", max(mode.residual_norm for mode in self.modes), 1e-8)

    def check_orthogonality(self) -> CheckResult:
        worst = 0.0
        for i, m in enumerate(self.modes):
            for n in self.modes[i + 1:]:
                worst = max(worst, abs(mode_overlap(m, n)))
        return _upper("spectrum.orthogonality", worst, 1e-8)

    def check_simplicity(self) -> CheckResult:
        shooter = Shooter(self.chart, rtol=self.config.shooting_tol)
        worst = math.inf
        for n, Lambda in enumerate(self.spectrum.inverse_lambdas, start=1):
            lo, hi = Lambda * (1.0 - 1e-6), Lambda * (1.0 + 1e-6)
            below, above = shooter.integrate(lo), shooter.integrate(hi)
            if below.count != n - 1 or above.count != n or below.upsilon_end * above.upsilon_end >= 0.0:
                worst = 0.0
                break
            worst = min(worst, simplicity_margin(self.chart, Lambda, rtol=self.config.shooting_tol))
        return _lower("spectrum.simple_sign_change", worst, 0.5, detail="|miss'| h / max|miss(Lambda +- h)|")

    def check_endpoint_exponent(self) -> CheckResult:
        target = (2.0 * self.chart.nu - 1.0) / 2.0
        worst = max(abs(endpoint_exponent(mode) - target) for mode in self.modes[:3])
        return _upper("spectrum.endpoint_exponent", worst, 1e-3)

    def check_kappa_ratio(self) -> CheckResult:
        mode = self.modes[0]
        ratio = printed_kappa(self.chart) / mode.profile.kappa_used
        return _upper("spectrum.kappa_ratio", abs(ratio / 2.0 ** (2.0 * self.chart.nu - 1.0) - 1.0), 1e-12)

    def check_weyl(self) -> CheckResult:
        n = self.config.weyl_n
        values = eigenvalues(self.chart, n, rtol=max(self.config.tol, 1e-10), workers=self.config.workers,
                             shooting_rtol=self.config.shooting_tol).inverse_lambdas
        measured = abs(n * n * math.pi ** 2 / (values[-1] * self.chart.zeta_plus ** 2) - 1.0)
        return _upper("spectrum.weyl_asymptotics", measured, 0.1, detail=f"n = {n}")

    def check_g_homogeneity(self) -> List[CheckResult]:
        c = 2.0
        scaled_eq = self.eq.model_copy(update={"g": c * self.eq.g})
        chart = LiouvilleChart(scaled_eq, self.config.l)
        scaled = spectrum_from_config(self.config, chart, n_max=min(3, self.config.n_max))
        lam = max(abs(s.lambda_n / (c * m.lambda_n) - 1.0) for s, m in zip(scaled.modes, self.modes))
        shape = max(float(np.max(np.abs(s.w - m.w))) for s, m in zip(scaled.modes, self.modes))
        return [_upper("spectrum.g_homogeneity_lambda", lam, 1e-9),
                _upper("spectrum.g_homogeneity_shape", shape, 1e-9)]

    # ------------------------------------------------------------------
    # fd_oracle

    def check_oracle_agreement(self) -> CheckResult:
        lambdas, _ = self.oracle
        shooting = np.asarray(self.spectrum.lambdas)
        return _upper("fd_oracle.agreement", float(np.max(np.abs(shooting / lambdas - 1.0))), 1e-6,
                      detail=f"N = {self.config.oracle_cells}, 2N, Richardson")

    def check_oracle_pencil(self) -> CheckResult:
        problem = assemble(self.eq, self.config.l, 8)
        off = np.abs(problem.offdiag)
        rows = problem.diag - np.concatenate((off, [0.0])) - np.concatenate(([0.0], off))
        bad = int(np.count_nonzero(rows <= 0.0)) + int(np.count_nonzero(problem.weight <= 0.0))
        return _upper("fd_oracle.spd_pencil", bad, 0)

    def check_oracle_inertia(self) -> CheckResult:
        problem = self.small_problem
        values = eigenvalues_fd(problem, self.config.n_max + 1)
        bad = sum(1 for n in range(1, len(values))
                  if sturm_count(problem, 0.5 * (values[n - 1] + values[n])) != n)
        return _upper("fd_oracle.sturm_inertia", bad, 0)

    def check_oracle_vectors(self) -> List[CheckResult]:
        problem = self.small_problem
        _, vectors = eigenvectors_fd(problem, self.config.n_max)
        signs = sum(1 for n in range(vectors.shape[1]) if _sign_changes(vectors[:, n]) != n)
        gram = vectors.T @ (problem.weight[:, None] * vectors)
        off = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
        return [_upper("fd_oracle.sign_changes", signs, 0), _upper("fd_oracle.m_orthogonality", off, 1e-10)]

    def check_grading(self) -> CheckResult:
        order = convergence_order(self.eq, self.config.l, 500, "sqrt")
        uniform = convergence_order(self.eq, self.config.l, 500, "uniform")
        return _lower("fd_oracle.graded_order", order, 1.8, detail=f"uniform-mesh order {uniform:.3f}")

    # ------------------------------------------------------------------
    # wavefield

    def check_residuals(self) -> List[CheckResult]:
        mode = self.modes[0]
        points = self.config.check_points
        results = []
        for label, field in (("type1", type1_field(mode, 0.01)), ("type2", type2_field(mode, 0.01))):
            report = residual_linear(field, points)
            worst = max(v for k, v in report.as_dict().items() if k != "divergence")
            results.append(_upper(f"wavefield.{label}_residuals", worst, 1e-7))
            results.append(_upper(f"wavefield.{label}_divergence", report.divergence, 1e-9))
        base = type1_field(mode, 0.01)
        baseline = residual_linear(base, points).vertical_momentum
        perturbed = residual_linear(base.with_frequency(mode.lambda_n * (1.0 + 1e-3)), points).vertical_momentum
        results.append(_lower("wavefield.lambda_sensitivity", perturbed / max(baseline, 1e-300), 1e2))
        return results

    def check_translation(self) -> CheckResult:
        field = type2_field(self.modes[0], 0.01)
        rng = np.random.default_rng(1)
        z = rng.uniform(0.0, self.eq.z_plus, 200)
        x = rng.uniform(0.0, 2.0 * math.pi / field.l, 200)
        t = rng.uniform(0.0, 2.0 * math.pi / field.omega, 200)
        shifted = x - field.omega * t / field.l
        worst = 0.0
        for name in ("delta_rho", "delta_P"):
            f = getattr(field, name)
            moving = f(t, x, z) - field.static_offset(name, x, z)
            reference = f(0.0, shifted, z) - field.static_offset(name, shifted, z)
            scale = float(np.max(np.abs(reference))) or 1.0
            worst = max(worst, float(np.max(np.abs(moving - reference))) / scale)
        return _upper("wavefield.type2_translation", worst, 1e-10)

    def check_surface_order(self) -> List[CheckResult]:
        results = []
        for kind, surfaces in self.surface_deviation.items():
            ratio = surfaces[0].deviation() / surfaces[1].deviation()
            results.append(_band(f"wavefield.surface_type{kind.value}_order", ratio, 3.5, 4.5))
        return results

    def check_surface_band(self) -> CheckResult:
        nu, z_plus = self.chart.nu, self.chart.z_plus
        worst = 0.0
        for surfaces in self.surface_deviation.values():
            for surface in surfaces:
                e = abs(surface.eps)
                lo, hi = z_plus - 1.1 * e * nu - 1.1 * e, z_plus + 1.1 * e
                worst = max(worst, float(np.max(surface.exact - hi)), float(np.max(lo - surface.exact)))
        return _upper("wavefield.surface_band", worst, 0.0)

    def check_vacuum_top(self) -> CheckResult:
        mode = self.modes[0]
        eps, nu = 0.05 / max(self.chart.nu / 2.0, 1.0), self.chart.nu
        x = np.array([1.5 * math.pi / mode.l])
        top = float(vacuum_top(mode, eps, x)[0])
        scale = (eps * nu) ** 2 * (1.0 + abs(mode.profile.dw_vacuum))
        return _upper("wavefield.vacuum_top_leading_order", abs(top - (self.chart.z_plus - eps * nu)) / scale, 2.0)

    # ------------------------------------------------------------------

    def checks(self) -> List[Callable]:
        return [
            self.check_hydrostatic, self.check_vacuum_slope, self.check_weight_positive,
            self.check_map_roundtrip, self.check_map_monotone, self.check_q_closed_form, self.check_lower_bound,
            self.check_indicial, self.check_seed_residual,
            self.check_increasing, self.check_zero_counts, self.check_normalization, self.check_ground,
            self.check_u_derivative, self.check_tg_residual, self.check_orthogonality, self.check_simplicity,
            self.check_endpoint_exponent, self.check_kappa_ratio, self.check_weyl, self.check_g_homogeneity,
            self.check_oracle_agreement, self.check_oracle_pencil, self.check_oracle_inertia,
            self.check_oracle_vectors, self.check_grading,
            self.check_residuals, self.check_translation, self.check_surface_order, self.check_surface_band,
            self.check_vacuum_top,
        ]

    def run(self) -> ValidationReport:
        results: List[CheckResult] = []
        for check in self.checks():
            name = check.__name__.replace("check_", "")
            try:
                outcome = check()
            except GravityModesError as e:
                logger.error(f"Check {name} raised: {e}", extra={"check": name})
                outcome = CheckResult(check_name=name, status=CheckStatus.ERROR, detail=str(e))
            if outcome is None:
                continue
            results.extend(outcome if isinstance(outcome, list) else [outcome])

        report = ValidationReport(checks=results)
        logger.info("Validation finished", extra={"checks": len(results), "failures": report.failures()})
        return report


def run_validation(config: RunConfig) -> ValidationReport:
    return ValidationSuite(config).run()
