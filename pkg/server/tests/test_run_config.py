import json
import logging

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from app.core.errors import ConfigError
from app.core.logging import JsonFormatter, get_logger
from app.models.run_config import RunConfig, load_run_config, parse_config_file
from app.models.wavefield import WaveKind
from app.utils.helpers import format_json, write_table


def test_defaults_describe_the_reference_background():
    config = RunConfig()
    assert (config.gamma, config.A, config.g, config.z_plus, config.l) == (1.5, 1.0 / 3.0, 1.0, 1.0, 1.0)
    assert config.n_max == 6
    assert config.oracle_cells == 10_000
    assert config.lambda_series == ()
    assert config.format == "csv"


def test_config_file_with_comments_and_aliases(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# reference run\n"
        "gamma = 1.6\n"
        "zplus = 2.0   # vacuum height\n"
        "nmax = 4\n"
        "lambda-series = 0.1, -0.02\n"
        "kind = 2\n"
        "\n"
    )
    assert parse_config_file(str(path))["lambda_series"] == "0.1, -0.02"
    config = load_run_config(str(path))
    assert config.gamma == 1.6
    assert config.z_plus == 2.0
    assert config.n_max == 4
    assert config.lambda_series == (0.1, -0.02)
    assert config.kind is WaveKind.TYPE2


def test_overrides_win_over_the_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("nmax = 3\nzplus = 2.0\n")
    config = load_run_config(str(path), {"n_max": 5, "z_plus": None, "eps": -0.05})
    assert config.n_max == 5
    assert config.z_plus == 2.0
    assert config.eps == -0.05


def test_line_without_separator(tmp_path):
    path = tmp_path / "broken.cfg"
    path.write_text("gamma = 1.5\nnmax 3\n")
    with pytest.raises(ConfigError) as info:
        parse_config_file(str(path))
    assert "broken.cfg:2" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config_file(str(tmp_path / "absent.cfg"))


@pytest.mark.parametrize("values", [
    {"gamma": 2.5},
    {"n": 7, "n_max": 6},
    {"eps": 0.2},
    {"unknown_key": 1},
    {"out": "  "},
    {"x_min": 1.0, "x_max": 0.5},
    {"tol": 1e-14},
])
def test_invalid_values(values):
    with pytest.raises(ValidationError):
        RunConfig.model_validate(values)


def test_csv_output_is_stable(tmp_path):
    frame = pd.DataFrame({"n": [1, 2], "value": [0.1, 1.0 / 3.0]})
    path = tmp_path / "table.csv"
    write_table(frame, str(path))
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert raw.decode() == "n,value\n1,0.10000000000000001\n2,0.33333333333333331\n"
    assert pd.read_csv(path)["value"].tolist() == [0.1, 1.0 / 3.0]


def test_json_output(tmp_path):
    frame = pd.DataFrame({"b": [np.float64(0.5)], "a": [np.int64(3)]})
    path = tmp_path / "table.json"
    write_table(frame, str(path), "json")
    assert json.loads(path.read_text()) == [{"a": 3, "b": 0.5}]
    assert format_json({"z": 1, "a": WaveKind.TYPE1}) == '{\n  "a": "1",\n  "z": 1\n}\n'
    with pytest.raises(ValueError):
        format_json({"value": float("nan")})


def test_json_floats_carry_seventeen_digits():
    assert format_json({"v": 0.1}) == '{\n  "v": 0.10000000000000001\n}\n'
    text = format_json([1.0 / 3.0, 2.0, 1e22, -0.0, 7])
    assert text == "[\n  0.33333333333333331,\n  2.0,\n  1e+22,\n  -0.0,\n  7\n]\n"
    assert json.loads(text) == [1.0 / 3.0, 2.0, 1e22, -0.0, 7]
    with pytest.raises(ValueError):
        format_json([float("inf")])


def test_structured_log_record_carries_extra_fields():
    logger = get_logger("services.test")
    assert logger.name == "app.services.test"
    record = logger.makeRecord(logger.name, logging.INFO, __file__, 1, "Oracle eigenvalues", (), None,
                               extra={"N": 1000, "k": 6})
    payload = json.loads(JsonFormatter().format(record))
    assert payload["message"] == "Oracle eigenvalues"
    assert payload["level"] == "INFO"
    assert (payload["N"], payload["k"]) == (1000, 6)
