"""Time-indexed solution records with dense output and CSV export."""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from rinzelkit.errors import DomainError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
FHR_COLUMNS = ("u", "w", "y")


class DenseSegment(Protocol):
    """Interpolant over one accepted step [t_old, t_new]."""

    t_old: float
    t_new: float

    def __call__(self, t: Union[float, np.ndarray]) -> np.ndarray: ...


@dataclass
class IntegrationStats:
    method: str
    abs_tol: float
    rel_tol: float
    n_steps: int = 0
    n_rejected: int = 0
    n_rhs: int = 0
    n_jac: int = 0
    n_lu: int = 0

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "n_steps": self.n_steps,
            "n_rejected": self.n_rejected,
            "n_rhs": self.n_rhs,
            "n_jac": self.n_jac,
            "n_lu": self.n_lu,
        }


@dataclass
class Trajectory:
    """Accepted-step samples plus one dense interpolant per step.

    ``t`` is strictly increasing; ``y[i]`` is the state at ``t[i]``; ``segments[i]``
    interpolates over ``[t[i], t[i + 1]]``.
    """

    t: np.ndarray
    y: np.ndarray
    segments: List[DenseSegment]
    stats: IntegrationStats
    names: Tuple[str, ...] = ()
    params: Optional[Any] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.names:
            dim = self.y.shape[1]
            self.names = FHR_COLUMNS if dim == 3 else tuple(f"x{i + 1}" for i in range(dim))

    @property
    def dim(self) -> int:
        return self.y.shape[1]

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def __len__(self) -> int:
        return len(self.t)

    def __call__(self, t: Union[float, Sequence[float], np.ndarray]) -> np.ndarray:
        """Dense output at ``t`` (scalar -> (dim,), array -> (len(t), dim))."""
        scalar = np.ndim(t) == 0
        times = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.t[0], self.t[-1]
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(times < lo - slack) or np.any(times > hi + slack):
            raise DomainError(f"dense output requested outside [{lo}, {hi}]")
        if not self.segments:
            out = np.repeat(self.y[:1], len(times), axis=0)
            return out[0] if scalar else out

        idx = np.searchsorted(self.t, times, side="right") - 1
        idx = np.clip(idx, 0, len(self.segments) - 1)
        out = np.empty((len(times), self.dim))
        for seg_index in np.unique(idx):
            mask = idx == seg_index
            out[mask] = self.segments[seg_index](times[mask])
        # Knots are reproduced exactly.
        knot = np.searchsorted(self.t, times)
        knot = np.clip(knot, 0, len(self.t) - 1)
        exact = self.t[knot] == times
        out[exact] = self.y[knot[exact]]
        return out[0] if scalar else out

    def dense_samples(self, per_step: int = 4) -> Tuple[np.ndarray, np.ndarray]:
        """Knots plus ``per_step`` evenly spaced interior points of every step."""
        if per_step <= 0 or len(self.t) < 2:
            return self.t.copy(), self.y.copy()
        frac = np.arange(1, per_step + 1) / (per_step + 1)
        interior = (self.t[:-1, None] + np.diff(self.t)[:, None] * frac[None, :]).ravel()
        times = np.sort(np.concatenate([self.t, interior]))
        return times, self(times)

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write ``t,<names>`` rows with 17 significant digits."""
        return write_columns_csv(path, ("t",) + tuple(self.names), np.column_stack([self.t, self.y]))


def write_columns_csv(path: Union[str, Path], header: Sequence[str], rows: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in np.atleast_2d(rows):
            writer.writerow([FLOAT_FORMAT % value for value in row])
    logger.debug("Wrote %d rows to %s", len(rows), path)
    return path


def read_columns_csv(path: Union[str, Path]) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Inverse of ``write_columns_csv``: header and float rows."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [[float(value) for value in row] for row in reader]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))
