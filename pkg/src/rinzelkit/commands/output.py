"""JSON report writer shared by the subcommands."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Union

import numpy as np

logger = logging.getLogger(__name__)


def json_safe(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null, numpy scalars and arrays are unwrapped."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Union[str, Path], data: Any) -> Path:
    """Write ``data`` with insertion-ordered keys and a trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(json_safe(data), indent=2, allow_nan=False) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path
