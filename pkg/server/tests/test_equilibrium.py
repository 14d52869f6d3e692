import math

import numpy as np
import pytest

from app.core.errors import InvalidArgumentError, InvalidProfileError, OutOfSupportError, DomainError
from app.services.equilibrium.background import (
    density,
    eval_background,
    hydrostatic_residual,
    make_perturbed,
    make_polytropic,
    pressure,
    sound_speed_sq,
    vacuum_slope,
    weight_mu,
)


def test_reference_constants(eq0):
    assert eq0.nu == pytest.approx(2.0, rel=1e-15)
    assert eq0.C_rho == pytest.approx(1.0, rel=1e-14)
    assert eq0.is_power_law


def test_nu_from_gamma():
    eq = make_polytropic(4.0 / 3.0, 0.7, 2.0, 3.0)
    assert eq.nu == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("field,args", [
    ("gamma", (2.5, 1.0, 1.0, 1.0)),
    ("gamma", (1.0, 1.0, 1.0, 1.0)),
    ("A", (1.5, 0.0, 1.0, 1.0)),
    ("g", (1.5, 1.0, -1.0, 1.0)),
    ("z_plus", (1.5, 1.0, 1.0, math.inf)),
])
def test_parameter_domain_errors_name_the_field(field, args):
    with pytest.raises(InvalidArgumentError) as info:
        make_polytropic(*args)
    assert info.value.field == field
    assert field in str(info.value)


def test_background_at_mid_height(eq0):
    sample = eval_background(eq0, 0.5)
    assert sample.rho == pytest.approx(0.25, rel=1e-14)
    assert sample.drho == pytest.approx(-1.0, rel=1e-14)
    assert sample.N_sq == pytest.approx(4.0, rel=1e-14)
    assert sample.pressure == pytest.approx(0.25 ** 1.5 / 3.0, rel=1e-14)
    assert sample.scale_height == pytest.approx(0.25, rel=1e-14)


def test_background_at_vacuum(eq0):
    sample = eval_background(eq0, 1.0, with_buoyancy=False)
    assert sample.rho == 0.0
    assert sample.drho == 0.0
    assert sample.pressure == 0.0
    assert sample.N_sq is None
    assert float(density(eq0, 1.3)) == 0.0


def test_buoyancy_outside_support(eq0):
    with pytest.raises(OutOfSupportError):
        eval_background(eq0, 1.0)
    with pytest.raises(DomainError):
        eval_background(eq0, -0.1, with_buoyancy=False)


def test_buoyancy_frequency_blows_up_like_nu_g_over_s(eq0):
    s = 1e-6
    sample = eval_background(eq0, 1.0 - s)
    assert sample.N_sq * s == pytest.approx(eq0.nu * eq0.g, rel=1e-6)


@pytest.mark.parametrize("l,z,expected", [(1.0, 0.0, 2.0), (1.0, 1.0, 0.0), (2.0, 0.0, 8.0)])
def test_weight(eq0, l, z, expected):
    assert float(weight_mu(eq0, l, z)) == pytest.approx(expected, abs=1e-14)


def test_weight_rejects_heights_outside_the_column(eq0):
    with pytest.raises(DomainError):
        weight_mu(eq0, 1.0, 1.5)


def test_vacuum_slope(eq0):
    assert vacuum_slope(eq0) == pytest.approx(-0.5, rel=1e-15)
    eq = make_polytropic(4.0 / 3.0, 1.0, 2.0, 1.0)
    assert vacuum_slope(eq) == pytest.approx(-2.0 / 3.0, rel=1e-12)


def test_vacuum_slope_ignores_correction_series(eq0):
    perturbed = make_perturbed(eq0, (0.4, -0.1))
    assert vacuum_slope(perturbed) == pytest.approx(-eq0.g / eq0.nu, rel=1e-14)
    h = 1e-7
    one_sided = (0.0 - sound_speed_sq(perturbed, 1.0 - h)) / h
    assert one_sided == pytest.approx(-0.5, rel=1e-5)


def test_empty_correction_returns_input(eq0):
    assert make_perturbed(eq0, ()) is eq0


def test_correction_series_evaluation(eq0):
    perturbed = make_perturbed(eq0, (0.1,))
    assert float(density(perturbed, 0.5)) == pytest.approx(0.25 * 1.05, rel=1e-14)
    assert not perturbed.is_power_law


def test_correction_breaking_positivity(eq0):
    with pytest.raises(InvalidProfileError) as info:
        make_perturbed(eq0, (-3.0,))
    assert 0.0 <= info.value.z <= 2.0 / 3.0
    assert info.value.field == "lambda_series"


def test_too_many_correction_terms(eq0):
    with pytest.raises(InvalidArgumentError):
        make_perturbed(eq0, (0.01,) * 9)


@pytest.mark.parametrize("coeffs", [(), (0.1, 0.05), (-0.3,)])
def test_hydrostatic_balance(eq0, coeffs):
    eq = make_perturbed(eq0, coeffs)
    assert hydrostatic_residual(eq, 200) <= 1e-12


def test_pressure_vectorized_matches_scalar(eq0):
    z = np.array([0.0, 0.25, 0.9, 1.0])
    values = pressure(eq0, z)
    assert values.shape == z.shape
    assert values[-1] == 0.0
    assert values[1] == pytest.approx(pressure(eq0, 0.25), rel=1e-15)
