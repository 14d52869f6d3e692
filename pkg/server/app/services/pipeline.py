"""
Builders shared by the CLI verbs and the validation suite
"""
import math
from typing import Tuple

import numpy as np

from ..core.logging import get_logger
from ..models.equilibrium import Equilibrium
from ..models.run_config import RunConfig
from ..models.spectrum import Spectrum
from .equilibrium.background import make_perturbed, make_polytropic
from .liouville.chart import LiouvilleChart
from .spectrum.solver import compute_spectrum

logger = get_logger("services.pipeline")


def equilibrium_from_config(config: RunConfig) -> Equilibrium:
    eq = make_polytropic(config.gamma, config.A, config.g, config.z_plus)
    return make_perturbed(eq, config.lambda_series)


def chart_from_config(config: RunConfig, eq: Equilibrium = None) -> LiouvilleChart:
    return LiouvilleChart(eq or equilibrium_from_config(config), config.l)


def spectrum_from_config(config: RunConfig, chart: LiouvilleChart, n_max: int = None) -> Spectrum:
    return compute_spectrum(
        chart, n_max or config.n_max, rtol=config.tol, samples=config.samples,
        workers=config.workers, shooting_rtol=config.shooting_tol,
    )


def surface_grids(config: RunConfig, lambda_n: float) -> Tuple[np.ndarray, np.ndarray]:
    """(t, x) grids; the defaults span one period and one wavelength."""
    t_max = config.t_max if config.t_max is not None else config.t_min + 2.0 * math.pi / math.sqrt(lambda_n)
    x_max = config.x_max if config.x_max is not None else config.x_min + 2.0 * math.pi / config.l
    return np.linspace(config.t_min, t_max, config.t_count), np.linspace(config.x_min, x_max, config.x_count)
