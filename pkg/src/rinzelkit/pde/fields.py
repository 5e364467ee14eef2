"""Space-time fields and their CSV / binary file formats.

CSV is long format ``x,t,value`` with t as the outer loop. The binary dump is
little-endian: the 4-byte magic ``RZKF``, uint32 version, uint32 nx, uint32 nt,
then nx doubles of x, nt doubles of t and nt*nx doubles of values in row-major
[t, x] order.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from rinzelkit.errors import DomainError

logger = logging.getLogger(__name__)

MAGIC = b"RZKF"
VERSION = 1
FLOAT_FORMAT = "%.17g"
_HEADER = np.dtype([("magic", "S4"), ("version", "<u4"), ("nx", "<u4"), ("nt", "<u4")])


def _check_shape(x: np.ndarray, t: np.ndarray, values: np.ndarray) -> None:
    if values.shape != (len(t), len(x)):
        raise DomainError(f"field shape {values.shape} does not match grid (nt={len(t)}, nx={len(x)})")


def write_field_csv(path: Union[str, Path], x, t, values) -> Path:
    x, t, values = np.asarray(x, float), np.asarray(t, float), np.asarray(values, float)
    _check_shape(x, t, values)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    xx = np.broadcast_to(x[None, :], values.shape).ravel()
    tt = np.broadcast_to(t[:, None], values.shape).ravel()
    np.savetxt(path, np.column_stack([xx, tt, values.ravel()]), fmt=FLOAT_FORMAT, delimiter=",",
               header="x,t,value", comments="", encoding="utf-8")
    logger.info("Wrote %d x %d field to %s", len(t), len(x), path)
    return path


def read_field_csv(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, encoding="utf-8")
    t = np.unique(data[:, 1])
    nx = len(data) // len(t)
    x = data[:nx, 0].copy()
    return x, t, data[:, 2].reshape(len(t), nx)


def write_field_binary(path: Union[str, Path], x, t, values) -> Path:
    x, t, values = np.asarray(x, float), np.asarray(t, float), np.asarray(values, float)
    _check_shape(x, t, values)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([(MAGIC, VERSION, len(x), len(t))], dtype=_HEADER)
    with path.open("wb") as fh:
        fh.write(header.tobytes())
        fh.write(x.astype("<f8").tobytes())
        fh.write(t.astype("<f8").tobytes())
        fh.write(np.ascontiguousarray(values).astype("<f8").tobytes())
    return path


def read_field_binary(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    raw = Path(path).read_bytes()
    header = np.frombuffer(raw[: _HEADER.itemsize], dtype=_HEADER)[0]
    if header["magic"] != MAGIC:
        raise DomainError(f"{path}: not a field dump (bad magic {header['magic']!r})")
    if header["version"] != VERSION:
        raise DomainError(f"{path}: unsupported field dump version {header['version']}")
    nx, nt = int(header["nx"]), int(header["nt"])
    body = np.frombuffer(raw[_HEADER.itemsize:], dtype="<f8")
    if body.size != nx + nt + nx * nt:
        raise DomainError(f"{path}: truncated field dump")
    return body[:nx].copy(), body[nx:nx + nt].copy(), body[nx + nt:].reshape(nt, nx).copy()


@dataclass
class PdeSolution:
    """Fields (u, w, y)(x, t) indexed [t, x], from the Picard or the method-of-lines route."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray
    w: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    residuals: List[float] = field(default_factory=list)
    method: str = ""
    meta: Dict[str, Any] = field(default_factory=dict)

    def values_of(self, name: str) -> np.ndarray:
        values = getattr(self, name, None) if name in ("u", "w", "y") else None
        if values is None:
            raise DomainError(f"field {name!r} is not available")
        return values

    @property
    def contraction_ratio(self) -> Optional[float]:
        """Geometric mean of successive residual ratios (None with fewer than two positive residuals)."""
        positive = [r for r in self.residuals if r > 0]
        if len(positive) < 2:
            return None
        return float((positive[-1] / positive[0]) ** (1.0 / (len(positive) - 1)))

    def sup_gap(self, other: "PdeSolution", name: str = "u", half_width: Optional[float] = None) -> float:
        """Sup-norm difference on shared nodes, optionally only where |x| <= half_width."""
        if self.u.shape != other.u.shape or not np.allclose(self.x, other.x) or not np.allclose(self.t, other.t):
            raise DomainError("solutions live on different grids")
        mask = np.ones_like(self.x, dtype=bool) if half_width is None else np.abs(self.x) <= half_width
        return float(np.max(np.abs(self.values_of(name)[:, mask] - other.values_of(name)[:, mask])))

    def to_csv(self, path: Union[str, Path], name: str = "u") -> Path:
        return write_field_csv(path, self.x, self.t, self.values_of(name))

    def to_binary(self, path: Union[str, Path], name: str = "u") -> Path:
        return write_field_binary(path, self.x, self.t, self.values_of(name))
