import math

import numpy as np
import pytest
import sympy as sp

from app.core.errors import DomainError, InvalidArgumentError, SingularPointError
from app.services.equilibrium.background import make_perturbed, make_polytropic
from app.services.liouville import series
from app.services.liouville.chart import (
    LiouvilleChart,
    power_law_q,
    q_of_zeta,
    singular_coefficient,
    verify_lower_bound,
    z_of_zeta,
    zeta_of_z,
)


class TestSeries:
    def test_power_matches_sympy(self):
        x = sp.symbols("x")
        expected = sp.series((1 + 2 * x + 3 * x ** 2) ** sp.Rational(1, 3), x, 0, 8).removeO()
        coeffs = [float(expected.coeff(x, k)) for k in range(8)]
        np.testing.assert_allclose(series.power([1.0, 2.0, 3.0], 1.0 / 3.0, 8), coeffs, rtol=1e-13, atol=1e-13)

    def test_reciprocal(self):
        np.testing.assert_allclose(series.reciprocal([1.0, -1.0], 5), np.ones(5), rtol=1e-15)

    def test_power_needs_positive_constant(self):
        with pytest.raises(InvalidArgumentError):
            series.power([0.0, 1.0], 0.5, 4)

    def test_compose_and_revert(self):
        # x + x^2 reverts to the signed Catalan series
        b = series.revert([0.0, 1.0, 1.0], 7)
        np.testing.assert_allclose(b, [0.0, 1.0, -1.0, 2.0, -5.0, 14.0, -42.0], rtol=1e-12, atol=1e-12)
        identity = series.compose([0.0, 1.0, 1.0], b, 7)
        np.testing.assert_allclose(identity, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_shift_and_derivative(self):
        np.testing.assert_array_equal(series.shift([1.0, 2.0], 2, 5), [0.0, 0.0, 1.0, 2.0, 0.0])
        np.testing.assert_array_equal(series.derivative([1.0, 2.0, 3.0, 4.0], 3), [2.0, 6.0, 12.0])

    def test_compose_requires_vanishing_inner_series(self):
        with pytest.raises(InvalidArgumentError):
            series.compose([1.0, 1.0], [1.0, 1.0], 3)

    def test_revert_needs_invertible_linear_term(self):
        with pytest.raises(InvalidArgumentError, match="reversion"):
            series.revert([0.0, 0.0, 1.0], 4)


class TestCoordinateMap:
    def test_zeta_plus_closed_form(self, chart0):
        assert chart0.zeta_plus == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)

    def test_forward_map(self, chart0):
        assert zeta_of_z(chart0, 0.0) == pytest.approx(0.0, abs=1e-13)
        assert zeta_of_z(chart0, 0.75) == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert zeta_of_z(chart0, 1.0) == chart0.zeta_plus

    def test_inverse_map(self, chart0):
        assert z_of_zeta(chart0, 0.0) == 0.0
        assert z_of_zeta(chart0, chart0.zeta_plus) == 1.0
        assert z_of_zeta(chart0, math.sqrt(2.0)) == pytest.approx(0.75, rel=1e-12)

    @pytest.mark.parametrize("gamma", [1.8, 5.0 / 3.0, 1.4])
    @pytest.mark.parametrize("l", [0.5, 2.0])
    def test_power_law_charts(self, gamma, l):
        chart = LiouvilleChart(make_polytropic(gamma, 1.0 / 3.0, 1.0, 1.0), l)
        scale = 2.0 * l * math.sqrt(chart.nu)
        assert chart.zeta_plus == pytest.approx(scale, rel=1e-12)
        assert zeta_of_z(chart, 0.75) == pytest.approx(0.5 * scale, rel=1e-12)
        assert z_of_zeta(chart, 0.5 * scale) == pytest.approx(0.75, rel=1e-12)

    def test_roundtrip_and_monotonicity(self, eq0):
        chart = LiouvilleChart(make_perturbed(eq0, (0.2, -0.05)), 1.5)
        z = np.linspace(0.0, chart.z_plus, 101)
        zeta = np.array([chart.zeta_of_z(v) for v in z])
        assert np.all(np.diff(zeta) > 0.0)
        back = np.array([chart.z_of_zeta(v) for v in zeta])
        np.testing.assert_allclose(back, z, atol=1e-10)

    def test_endpoint_asymptotics(self, chart0):
        s = 1e-8
        ratio = chart0.offset_of_z(1.0 - s) / (2.0 * chart0.l * math.sqrt(chart0.nu * chart0.g) * math.sqrt(s))
        assert ratio == pytest.approx(1.0, abs=1e-4)

    @pytest.mark.parametrize("z", [-0.1, 1.2])
    def test_forward_domain(self, chart0, z):
        with pytest.raises(DomainError):
            zeta_of_z(chart0, z)

    def test_inverse_domain(self, chart0):
        with pytest.raises(DomainError):
            z_of_zeta(chart0, chart0.zeta_plus + 0.1)

    def test_wavenumber_must_be_positive(self, eq0):
        with pytest.raises(InvalidArgumentError):
            LiouvilleChart(eq0, 0.0)


class TestPotential:
    def test_ground_value(self, chart0):
        assert q_of_zeta(chart0, 0.0) == pytest.approx(0.59375, rel=1e-12)

    def test_closed_form(self, chart0):
        x = np.linspace(0.05, chart0.zeta_plus, 40)
        values = np.array([chart0.q_of_offset(v) for v in x])
        np.testing.assert_allclose(values, power_law_q(chart0, x), rtol=1e-9)

    def test_singular_endpoint(self, chart0):
        with pytest.raises(SingularPointError):
            q_of_zeta(chart0, chart0.zeta_plus)

    def test_inverse_square_coefficient(self, chart0):
        t = math.sqrt(1e-8)
        x = chart0.offset_of_t(t)
        assert chart0.q_of_s(t * t) * x * x == pytest.approx(chart0.K, abs=1e-4)

    def test_bounded_for_three_halves(self):
        chart = LiouvilleChart(make_polytropic(1.0 + 1.0 / 1.5, 1.0, 1.0, 1.0), 1.0)
        near = [chart.q_of_s(s) for s in (1e-4, 1e-6, 1e-8)]
        assert max(abs(v) for v in near) < 10.0

    def test_endpoint_series(self, chart0):
        # x^2 q = K + x^4 / 16 for the reference background
        assert chart0.q_series[0] == pytest.approx(0.75, rel=1e-14)
        assert chart0.q_series[1] == pytest.approx(0.0, abs=1e-12)
        assert chart0.q_series[2] == pytest.approx(1.0 / 16.0, rel=1e-10)
        np.testing.assert_allclose(chart0.q_series[3:], 0.0, atol=1e-10)

    @pytest.mark.parametrize("nu,K", [(2.0, 0.75), (1.5, 0.0), (1.25, -0.1875)])
    def test_singular_coefficient(self, nu, K):
        assert singular_coefficient(nu) == pytest.approx(K, abs=1e-15)

    def test_singular_coefficient_domain(self):
        with pytest.raises(InvalidArgumentError):
            singular_coefficient(1.0)


class TestLowerBound:
    def test_reference_background(self, chart0):
        bound = verify_lower_bound(chart0, 1000)
        assert bound.ok
        assert bound.K1 == 0.0
        assert bound.K0 == pytest.approx(2.0 * math.sqrt(3.0 / 64.0), rel=1e-3)
        assert bound.K0 >= 2.0 * math.sqrt(3.0 / 64.0) - 1e-12

    def test_negative_coefficient(self):
        chart = LiouvilleChart(make_polytropic(1.8, 1.0, 1.0, 1.0), 1.0)
        bound = verify_lower_bound(chart, 2000)
        assert bound.ok
        assert bound.K1 == pytest.approx(-0.1875 - 1e-6, abs=1e-12)
        assert bound.K1 > -0.25

    def test_grid_too_small(self, chart0):
        with pytest.raises(InvalidArgumentError):
            verify_lower_bound(chart0, 1)
