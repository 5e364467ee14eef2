"""Certificate region maps over one- or two-parameter grids."""

import csv
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from rinzelkit.analysis.certificate import certificate
from rinzelkit.errors import ConfigError, DomainError
from rinzelkit.model.params import PARAM_KEYS, FhrParams
from rinzelkit.solvers.trajectory import FLOAT_FORMAT

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ("a", "eps1", "f", "g", "C", "C1", "ratio", "valid")
AXIS_NAMES = PARAM_KEYS + ("eps1",)


@dataclass(frozen=True)
class ScanAxis:
    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        problems = []
        if self.name not in AXIS_NAMES:
            problems.append(f"unknown axis {self.name!r} (allowed: {', '.join(AXIS_NAMES)})")
        if not isinstance(self.num, int) or self.num < 1:
            problems.append(f"axis {self.name!r}: num must be a positive integer")
        elif self.num > 1 and not self.stop > self.start:
            problems.append(f"axis {self.name!r}: need start < stop for more than one point")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            problems.append(f"axis {self.name!r}: start and stop must be finite")
        if problems:
            raise ConfigError("Degenerate scan grid: " + "; ".join(problems))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ScanAxis":
        unknown = sorted(set(data) - {"name", "start", "stop", "num"})
        missing = [key for key in ("name", "start", "stop", "num") if key not in data]
        if unknown or missing:
            raise ConfigError(
                f"Scan axis keys: unknown {unknown or '[]'}, missing {missing or '[]'}"
            )
        return cls(str(data["name"]), float(data["start"]), float(data["stop"]), int(data["num"]))

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


def _evaluate_cell(cell: Tuple[Dict[str, float], float]) -> Tuple[float, ...]:
    values, eps1 = cell
    p = FhrParams(**values)
    try:
        cert = certificate(p, eps1)
    except DomainError:
        # Hypothesis violations (k <= 0) map to invalid cells.
        return (p.a, eps1, math.nan, math.nan, math.nan, math.nan, math.nan, False)
    return (p.a, eps1, cert.f, cert.g, cert.C, cert.C1, cert.ratio, cert.valid)


def scan_columns(x: ScanAxis, y: Optional[ScanAxis] = None) -> Tuple[str, ...]:
    extra = tuple(ax.name for ax in (x, y) if ax is not None and ax.name not in SCAN_COLUMNS)
    return extra + SCAN_COLUMNS


def scan_certificates(
    base: FhrParams,
    x: ScanAxis,
    y: Optional[ScanAxis] = None,
    eps1: float = 0.0,
    jobs: Optional[int] = 1,
) -> List[Dict[str, Any]]:
    """Evaluate ``certificate`` on every cell of the x (times y) grid.

    Rows come back in grid order (x outer, y inner) whatever the worker count.

    Args:
        base: Parameters for every key not on an axis.
        x: First axis.
        y: Optional second axis.
        eps1: Slack used unless an axis is named ``eps1``.
        jobs: Worker processes; ``None`` uses every CPU, 1 runs in-process.
    """
    axes = [ax for ax in (x, y) if ax is not None]
    if y is not None and y.name == x.name:
        raise ConfigError(f"Scan axes must differ (both are {x.name!r})")

    cells = []
    for combo in itertools.product(*(ax.values() for ax in axes)):
        values = base.to_dict()
        cell_eps1 = eps1
        for ax, v in zip(axes, combo):
            if ax.name == "eps1":
                cell_eps1 = float(v)
            else:
                values[ax.name] = float(v)
        cells.append((values, cell_eps1))

    workers = jobs or os.cpu_count() or 1
    logger.info("Scanning %d cells with %d worker(s)", len(cells), workers)
    if workers == 1 or len(cells) == 1:
        results = [_evaluate_cell(cell) for cell in cells]
    else:
        chunk = max(1, len(cells) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_cell, cells, chunksize=chunk))

    columns = scan_columns(x, y)
    rows = []
    for (values, _), result in zip(cells, results):
        row = dict(zip(SCAN_COLUMNS, result))
        for name in columns[: len(columns) - len(SCAN_COLUMNS)]:
            row[name] = values[name]
        rows.append({name: row[name] for name in columns})
    return rows


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return FLOAT_FORMAT % value


def write_scan_csv(rows: Sequence[Mapping[str, Any]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(rows[0].keys()) if rows else list(SCAN_COLUMNS)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
    logger.info("Wrote %d scan rows to %s", len(rows), path)
    return path


def read_scan_csv(path: Union[str, Path]) -> List[Dict[str, Any]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            {c: (v == "true") if c == "valid" else float(v) for c, v in record.items()}
            for record in reader
        ]
