import pytest

from app.services.equilibrium.background import make_polytropic
from app.services.liouville.chart import LiouvilleChart
from app.services.spectrum.solver import compute_spectrum


@pytest.fixture(scope="session")
def eq0():
    """Reference background: nu = 2, C = 1, g = 1, z_plus = 1."""
    return make_polytropic(1.5, 1.0 / 3.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def chart0(eq0):
    return LiouvilleChart(eq0, 1.0)


@pytest.fixture(scope="session")
def spectrum0(chart0):
    return compute_spectrum(chart0, 6)


@pytest.fixture(scope="session")
def mode1(spectrum0):
    return spectrum0.modes[0]
