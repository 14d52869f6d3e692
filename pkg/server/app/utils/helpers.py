import json
import math
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = "%.17g"
_FLOAT_TOKEN = re.compile(r'"\\u0000f(\d+)"')


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays and enums into JSON-serializable builtins"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value") and not isinstance(value, (int, float, str)):
        return value.value
    return value


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps LF line endings on every platform
    with target.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"Out of range float values are not JSON compliant: {value!r}")
    text = CSV_FLOAT_FORMAT % value
    # keep floats distinguishable from integers
    return text if any(c in text for c in ".en") else text + ".0"


def _tokenize_floats(value: Any, literals: List[str]) -> Any:
    if isinstance(value, dict):
        return {k: _tokenize_floats(v, literals) for k, v in value.items()}
    if isinstance(value, list):
        return [_tokenize_floats(v, literals) for v in value]
    if isinstance(value, float):
        literals.append(_format_float(value))
        return f"\x00f{len(literals) - 1}"
    return value


def format_json(payload: Any) -> str:
    """Stable JSON: sorted keys, floats with 17 significant digits, trailing newline"""
    literals: List[str] = []
    text = json.dumps(_tokenize_floats(to_builtin(payload), literals), sort_keys=True, indent=2)
    return _FLOAT_TOKEN.sub(lambda m: literals[int(m.group(1))], text) + "\n"


def write_json(payload: Any, path: Optional[str] = None) -> None:
    _emit(format_json(payload), path)


def write_table(frame: pd.DataFrame, path: Optional[str] = None, fmt: str = "csv") -> None:
    """Write a table as CSV (',' separator, '.' decimal point, LF, 17 significant digits) or JSON records"""
    if fmt == "json":
        records: List[Dict[str, Any]] = frame.to_dict(orient="records")
        write_json(records, path)
        return
    text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    _emit(text, path)
