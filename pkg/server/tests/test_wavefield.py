import math

import numpy as np
import pytest

from app.core.errors import AmplitudeError, InvalidArgumentError
from app.models.wavefield import WaveKind
from app.services.wavefield.fields import WaveField, _check_amplitude, residual_linear, type1_field, type2_field
from app.services.wavefield.surface import surface_type1, surface_type2, vacuum_top


@pytest.fixture(scope="module")
def grids(mode1):
    omega = math.sqrt(mode1.lambda_n)
    return np.linspace(0.0, 2.0 * math.pi / omega, 5), np.linspace(0.0, 2.0 * math.pi / mode1.l, 17)


@pytest.fixture(scope="module")
def sample_points(eq0, mode1):
    rng = np.random.default_rng(7)
    z = rng.uniform(0.0, eq0.z_plus, 300)
    x = rng.uniform(0.0, 2.0 * math.pi / mode1.l, 300)
    t = rng.uniform(0.0, 2.0 * math.pi / math.sqrt(mode1.lambda_n), 300)
    return t, x, z


class TestFields:
    @pytest.mark.parametrize("build", [type1_field, type2_field])
    def test_residuals(self, mode1, build):
        report = residual_linear(build(mode1, 0.01), 1000)
        assert report.samples == 1000
        assert report.continuity <= 1e-12
        assert max(report.as_dict().values()) <= 1e-7
        assert report.divergence <= 1e-9

    def test_residual_reacts_to_wrong_frequency(self, mode1):
        field = type1_field(mode1, 0.01)
        baseline = residual_linear(field, 1000).vertical_momentum
        perturbed = residual_linear(field.with_frequency(mode1.lambda_n * (1.0 + 1e-3)), 1000).vertical_momentum
        assert perturbed > 1e-6
        assert perturbed >= 100.0 * baseline

    @pytest.mark.parametrize("build", [type1_field, type2_field])
    def test_displacement_starts_at_rest(self, mode1, sample_points, build):
        _, x, z = sample_points
        field = build(mode1, 0.05)
        for component in (field.xi1, field.xi3, field.delta_P, field.psi):
            np.testing.assert_array_equal(component(0.0, x, z), 0.0)

    def test_standing_vibration(self, mode1, sample_points):
        _, x, z = sample_points
        field = type1_field(mode1, 0.05)
        np.testing.assert_array_equal(field.delta_rho(0.0, x, z), 0.0)
        np.testing.assert_array_equal(field.delta_rho_initial(x, z), 0.0)
        t_peak = math.pi / (2.0 * field.omega)
        x_peak = math.pi / (2.0 * field.l)
        w, _, _ = field.vertical(z)
        np.testing.assert_allclose(field.xi3(t_peak, x_peak, z), 0.05 * w, rtol=1e-14, atol=1e-16)

    def test_progressive_wave_initial_density(self, mode1, sample_points):
        _, x, z = sample_points
        field = type2_field(mode1, 0.05)
        initial = field.delta_rho_initial(x, z)
        assert np.max(np.abs(initial)) > 0.0
        reference = field.delta_rho(0.0, x, z)
        np.testing.assert_allclose(initial, reference, rtol=1e-10, atol=1e-10 * np.max(np.abs(reference)))

    def test_progressive_wave_translation(self, mode1, sample_points):
        t, x, z = sample_points
        field = type2_field(mode1, 0.05)
        shifted = x - field.omega * t / field.l
        for name in ("delta_rho", "delta_P", "xi1", "xi3", "psi"):
            f = getattr(field, name)
            moving = f(t, x, z) - field.static_offset(name, x, z)
            reference = f(0.0, shifted, z) - field.static_offset(name, shifted, z)
            scale = float(np.max(np.abs(reference)))
            assert np.max(np.abs(moving - reference)) <= 1e-10 * scale

    @pytest.mark.parametrize("build", [type1_field, type2_field])
    def test_divergence_free(self, mode1, sample_points, build):
        t, x, z = sample_points
        field = build(mode1, 0.05)
        _, dw, _ = field.vertical(z)
        assert np.max(np.abs(field.divergence(t, x, z))) <= 1e-9 * 0.05 * np.max(np.abs(dw))

    def test_divergence_detects_inconsistent_horizontal_field(self, mode1, sample_points):
        t, x, z = sample_points

        class Skewed(WaveField):
            def xi1(self, t, x, z):
                return 1.01 * super().xi1(t, x, z)

        field = type1_field(mode1, 0.05)
        skewed = Skewed(mode=field.mode, kind=field.kind, eps=field.eps, lambda_n=field.lambda_n)
        _, dw, _ = field.vertical(z)
        scale = 0.05 * np.max(np.abs(dw))
        assert np.max(np.abs(skewed.divergence(t, x, z))) > 1e-3 * scale
        assert residual_linear(skewed, 1000).divergence > 1e-3

    def test_unknown_component(self, mode1):
        with pytest.raises(InvalidArgumentError):
            type2_field(mode1, 0.01).static_offset("vorticity", 0.0, 0.5)

    @pytest.mark.parametrize("build", [type1_field, type2_field])
    def test_amplitude_limit(self, mode1, build):
        with pytest.raises(AmplitudeError):
            build(mode1, 0.11)

    def test_progressive_amplitude_limit_scales_with_nu(self):
        _check_amplitude(0.1, 2.0, WaveKind.TYPE2)
        _check_amplitude(0.1, 3.0, WaveKind.TYPE1)
        with pytest.raises(AmplitudeError):
            _check_amplitude(0.1, 3.0, WaveKind.TYPE2)


class TestSurfaces:
    @pytest.mark.parametrize("build", [surface_type1, surface_type2])
    def test_zero_amplitude(self, mode1, grids, build):
        surface = build(mode1, 0.0, *grids)
        np.testing.assert_array_equal(surface.exact, 1.0)
        np.testing.assert_array_equal(surface.first_order, 1.0)

    def test_vibration_starts_flat(self, mode1, grids):
        surface = surface_type1(mode1, 0.05, *grids)
        assert surface.exact.shape == (5, 17)
        np.testing.assert_allclose(surface.exact[0], 1.0, atol=1e-15)

    @pytest.mark.parametrize("build", [surface_type1, surface_type2])
    def test_quadratic_error(self, mode1, grids, build):
        coarse = build(mode1, 1e-2, *grids).deviation()
        fine = build(mode1, 5e-3, *grids).deviation()
        assert 3.5 <= coarse / fine <= 4.5

    @pytest.mark.parametrize("build", [surface_type1, surface_type2])
    @pytest.mark.parametrize("eps", [0.02, -0.02])
    def test_surface_band(self, mode1, grids, build, eps):
        nu = mode1.profile.chart.nu
        surface = build(mode1, eps, *grids)
        e = abs(eps)
        assert np.all(surface.exact <= 1.0 + 1.1 * e)
        assert np.all(surface.exact >= 1.0 - 1.1 * e * nu - 1.1 * e)

    def test_monotonicity_precondition(self, mode1, grids):
        steep = mode1.model_copy(update={"u_vacuum": 20.0 / mode1.l})
        with pytest.raises(AmplitudeError):
            surface_type1(steep, 0.1, *grids)

    def test_domain_top_where_condition_is_vacuous(self, mode1):
        x = np.linspace(0.0, math.pi / mode1.l, 9)
        np.testing.assert_array_equal(vacuum_top(mode1, 0.05, x), 1.0)

    def test_domain_top_leading_order(self, mode1):
        x = np.array([1.5 * math.pi / mode1.l])
        top = float(vacuum_top(mode1, 0.05, x)[0])
        # s = 2 eps w(z_plus - s) exactly for the pure power law
        s = 1.0 - top
        assert s == pytest.approx(0.1 * float(mode1.profile.w(np.array([top]))[0]), rel=1e-10)
        assert abs(top - 0.9) <= 4.0 * 0.1 ** 2 * (1.0 + abs(mode1.u_vacuum))
        small = float(vacuum_top(mode1, 1e-4, x)[0])
        assert (1.0 - small) / 2e-4 == pytest.approx(1.0, abs=1e-2)

    def test_static_top_is_reported(self, mode1, grids):
        surface = surface_type2(mode1, -0.02, *grids)
        assert surface.kind == WaveKind.TYPE2
        assert surface.static_top.shape == grids[1].shape
        assert np.all(surface.static_top <= 1.0)
