"""
Command-line front end.

    python -m app spectrum --nmax 6 --out spectrum.csv
    python -m app mode --n 2 --samples 512
    python -m app surface --kind 2 --eps 0.01
    python -m app validate --out report.json

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 numerical failure.
"""
import argparse
import sys
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .core.errors import ConfigError, GravityModesError
from .core.logging import app_logger, set_level
from .models.run_config import RunConfig, load_run_config
from .services.fd_oracle.discretization import oracle_lambdas
from .services.pipeline import chart_from_config, equilibrium_from_config, spectrum_from_config, surface_grids
from .services.spectrum.solver import dispersion
from .services.validation.suite import run_validation
from .services.wavefield.surface import surface_type1, surface_type2
from .models.wavefield import WaveKind
from .utils.helpers import write_json, write_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SPECTRUM_COLUMNS = ["n", "lambda", "frequency", "phase_speed", "zero_count", "residual_norm",
                    "oracle_value", "oracle_rel_err"]
MODE_COLUMNS = ["z", "zeta", "upsilon", "w", "u", "deltaP"]
SURFACE_COLUMNS = ["t", "x", "z_exact", "z_first_order"]

# flag dest -> RunConfig field
FLAG_FIELDS = {
    "gamma": "gamma", "A": "A", "g": "g", "zplus": "z_plus", "l": "l", "nmax": "n_max", "n": "n",
    "eps": "eps", "kind": "kind", "samples": "samples", "tol": "tol", "out": "out", "format": "format",
    "workers": "workers", "lambda_series": "lambda_series", "oracle_cells": "oracle_cells",
    "inject_fault": "inject_fault", "log_level": "log_level", "weyl_n": "weyl_n",
    "t_count": "t_count", "x_count": "x_count", "t_max": "t_max",
}


def cmd_spectrum(config: RunConfig) -> int:
    """One row per mode with the Richardson-extrapolated oracle value."""
    eq = equilibrium_from_config(config)
    chart = chart_from_config(config, eq)
    spectrum = spectrum_from_config(config, chart)
    oracle, _ = oracle_lambdas(eq, config.l, config.oracle_cells, config.n_max)

    rows = []
    for mode, reference in zip(spectrum.modes, oracle):
        frequency, phase_speed = dispersion(mode)
        rows.append({
            "n": mode.n, "lambda": mode.lambda_n, "frequency": frequency, "phase_speed": phase_speed,
            "zero_count": mode.zero_count, "residual_norm": mode.residual_norm,
            "oracle_value": float(reference), "oracle_rel_err": abs(mode.lambda_n / reference - 1.0),
        })
    write_table(pd.DataFrame(rows, columns=SPECTRUM_COLUMNS), config.out, config.format)
    return EXIT_OK


def cmd_mode(config: RunConfig) -> int:
    """Profile of mode n on `samples` heights from the ground to z_plus."""
    chart = chart_from_config(config)
    mode = spectrum_from_config(config, chart, n_max=config.n).modes[config.n - 1]
    frame = pd.DataFrame({
        "z": mode.z, "zeta": mode.zeta, "upsilon": mode.upsilon, "w": mode.w, "u": mode.u, "deltaP": mode.deltaP,
    }, columns=MODE_COLUMNS)
    write_table(frame, config.out, config.format)
    return EXIT_OK


def cmd_surface(config: RunConfig) -> int:
    """Exact and first-order vacuum surfaces, rows ordered t-major then x."""
    if config.kind is None:
        raise ConfigError("surface needs a wave kind (1 or 2)", field="kind")
    chart = chart_from_config(config)
    mode = spectrum_from_config(config, chart, n_max=config.n).modes[config.n - 1]
    t, x = surface_grids(config, mode.lambda_n)
    build = surface_type1 if config.kind == WaveKind.TYPE1 else surface_type2
    surface = build(mode, config.eps, t, x)

    T, X = (grid.ravel() for grid in np.meshgrid(surface.t, surface.x, indexing="ij"))
    frame = pd.DataFrame({
        "t": T, "x": X, "z_exact": surface.exact.ravel(), "z_first_order": surface.first_order.ravel(),
    }, columns=SURFACE_COLUMNS)
    write_table(frame, config.out, config.format)
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    report = run_validation(config)
    write_json(report.model_dump(mode="json"), config.out)
    if not report.passed:
        app_logger.error(f"Validation failed: {', '.join(report.failures())}")
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "mode": cmd_mode,
    "surface": cmd_surface,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="Output path (standard output when omitted)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--gamma", type=float)
    common.add_argument("--A", dest="A", type=float)
    common.add_argument("--g", type=float)
    common.add_argument("--zplus", type=float)
    common.add_argument("--lambda-series", dest="lambda_series", help="Correction coefficients c1,c2,...")
    common.add_argument("--l", type=float)
    common.add_argument("--nmax", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--eps", type=float)
    common.add_argument("--kind", choices=["1", "2"])
    common.add_argument("--samples", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--t-count", dest="t_count", type=int)
    common.add_argument("--x-count", dest="x_count", type=int)
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--workers", type=int)
    common.add_argument("--oracle-cells", dest="oracle_cells", type=int)
    common.add_argument("--weyl-n", dest="weyl_n", type=int)
    common.add_argument("--inject-fault", dest="inject_fault", choices=["kappa"])
    common.add_argument("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(prog="python -m app", description="Gravity modes of an atmosphere touching vacuum")
    verbs = parser.add_subparsers(dest="command", required=True)
    for name, handler in COMMANDS.items():
        verbs.add_parser(name, parents=[common], help=handler.__doc__.splitlines()[0] if handler.__doc__ else name)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, object] = {FLAG_FIELDS[key]: value for key, value in vars(args).items() if key in FLAG_FIELDS}
    try:
        return load_run_config(args.config, overrides)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(f"{field}: {first['msg']}", field=field) from exc


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    try:
        config = config_from_args(args)
        if config.log_level:
            set_level(config.log_level)
        return COMMANDS[args.command](config)
    except GravityModesError as e:
        app_logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        app_logger.error(f"Unhandled exception: {str(e)}", exc_info=True)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
