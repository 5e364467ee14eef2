"""Kernel tables for discrete convolutions on a uniform grid.

Table entries are H integrated against the piecewise-linear hat of width dx,
K[n, m] = int H(m dx - xi, t_n) hat(xi) dxi, so that sum_m K[n, i - m] v_m is the
exact convolution of H with the linear interpolant of the samples v. The heat
part has a closed form; the memory corrections use fixed Gauss-Legendre rules
in the sin^2 substitution variable.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy import special

from rinzelkit.model.params import FhrParams

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 40


def theta_rule(order: int = DEFAULT_ORDER) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [0, pi/2] as (sin theta, cos theta, weights)."""
    nodes, weights = legendre.leggauss(order)
    theta = 0.25 * math.pi * (nodes + 1.0)
    return np.sin(theta), np.cos(theta), 0.25 * math.pi * weights


def _psi(z: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Second antiderivative of the N(0, sigma^2) density, split as max(z, 0) plus a decaying tail."""
    r = -np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sigma > 0, r / np.where(sigma > 0, sigma, 1.0), -np.inf)
        density = np.exp(-0.5 * ratio * ratio) / math.sqrt(2 * math.pi)
        tail = np.where(sigma > 0, r * special.ndtr(ratio) + sigma * density, 0.0)
    return np.maximum(z, 0.0) + tail


def hat_heat(x: np.ndarray, y, D: float, dx: float) -> np.ndarray:
    """Heat kernel at time ``y`` integrated against the hat of width ``dx``; shape y.shape + x.shape."""
    y = np.asarray(y, dtype=float)[..., None]
    sigma = np.sqrt(2.0 * D * np.maximum(y, 0.0))
    return (_psi(x + dx, sigma) - 2.0 * _psi(x, sigma) + _psi(x - dx, sigma)) / dx


def hat_h1(x: np.ndarray, y, p: FhrParams, dx: float, rule) -> np.ndarray:
    """Hat-smoothed H1 at times ``y`` (any shape) and offsets ``x``."""
    y = np.asarray(y, dtype=float)
    damped = hat_heat(x, y, p.D, dx) * np.exp(-p.a * y)[..., None]
    if p.eps == 0.0:
        return damped
    s, c, w = rule
    root_eps = math.sqrt(p.eps)
    inner_y = y[..., None] * s * s
    factor = (
        np.exp(-p.a * inner_y - p.eta * y[..., None] * c * c)
        * 2.0 * y[..., None] * root_eps * s * s
        * special.j1(2.0 * root_eps * y[..., None] * s * c)
    )
    correction = np.einsum("...q,...qm->...m", factor * w, hat_heat(x, inner_y, p.D, dx))
    return damped - correction


def hat_h(x: np.ndarray, t: float, p: FhrParams, dx: float, rule) -> np.ndarray:
    """Hat-smoothed composite kernel H1 - H2 at a single time ``t``."""
    first = hat_h1(x, t, p, dx, rule)
    if p.delta == 0.0 or t == 0.0:
        return first
    s, c, w = rule
    root_delta = math.sqrt(p.delta)
    factor = np.exp(-p.gamma * t * c * c) * 2.0 * t * root_delta * s * s * special.j1(2.0 * root_delta * t * s * c)
    second = np.einsum("q,qm->m", factor * w, hat_h1(x, t * s * s, p, dx, rule))
    return first - second


@dataclass
class KernelTables:
    """Rows K[n] over lags -(nx-1)..(nx-1), one per time level."""

    dx: float
    nx: int
    t: np.ndarray
    K: np.ndarray

    @property
    def lags(self) -> np.ndarray:
        return self.dx * np.arange(-(self.nx - 1), self.nx)


def _table_row(args: Tuple[Dict[str, float], float, int, float, int]) -> np.ndarray:
    values, dx, nx, t, order = args
    p = FhrParams(**values)
    half = hat_h(dx * np.arange(nx), t, p, dx, theta_rule(order))
    return np.concatenate([half[:0:-1], half])


def build_tables(
    p: FhrParams,
    dx: float,
    nx: int,
    ts: Sequence[float],
    order: int = DEFAULT_ORDER,
    jobs: Optional[int] = 1,
) -> KernelTables:
    """Tables for every time level in ``ts``; rows are computed in parallel when ``jobs`` != 1."""
    ts = np.asarray(ts, dtype=float)
    values = p.to_dict()
    rows = [(values, dx, nx, float(t), order) for t in ts]
    workers = jobs or os.cpu_count() or 1
    if workers == 1:
        K = np.array([_table_row(r) for r in rows])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            K = np.array(list(pool.map(_table_row, rows)))
    logger.debug("Built kernel tables: %d levels x %d lags", K.shape[0], K.shape[1])
    return KernelTables(dx=dx, nx=nx, t=ts, K=K)
