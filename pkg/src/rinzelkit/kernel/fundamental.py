"""Fundamental solution H = H1 - H2 of the linearized FHR operator.

H1 carries the heat kernel damped by e^{-at} and a Bessel-J1 memory correction
from the recovery variable; H2 folds the slow current into H1 the same way.
Both correction integrals have an integrable 1/sqrt(t - y) factor at y = t,
removed by the substitution y = t sin^2(theta); J1(z) ~ z/2 keeps the
transformed integrands smooth on [0, pi/2].

The composite kernel is not the exact fundamental solution of the operator with
both memory terms: its Laplace transform differs at order eps*delta*t^4/24
relative to the heat kernel, which is well below the cross-check tolerance on
short horizons.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import integrate

from rinzelkit.errors import AccuracyError, DomainError
from rinzelkit.model.params import FhrParams
from rinzelkit.pde.fields import write_field_binary, write_field_csv
from rinzelkit.special.bessel import bessel_j1

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
DEFAULT_TOL = 1e-10
DEFAULT_SUBDIVISIONS = 200
MAX_CHEB_DEGREE = 512


@dataclass(frozen=True)
class KernelValue:
    value: float
    error: float


def _check_point(t: float, p: FhrParams, tol: float) -> None:
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"kernel needs t > 0 (got t={t!r})")
    if not p.D > 0:
        raise DomainError(f"kernel needs D > 0 (got D={p.D!r})")
    if p.eps < 0 or p.delta < 0:
        raise DomainError("kernel needs eps >= 0 and delta >= 0")
    if not tol > 0:
        raise DomainError(f"tolerance must be > 0 (got {tol!r})")


def heat_kernel(x, t, D: float):
    """exp(-x^2 / (4 D t)) / (2 sqrt(pi D t))."""
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (4.0 * D * t)) / (2.0 * np.sqrt(math.pi * D * t))


def _scaled_heat(x: float, t: float, s, D: float):
    """sin(theta) * G(x, t sin^2 theta), finite at theta = 0."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        gauss = np.where(s > 0, np.exp(-x * x / (4.0 * D * t * s * s)), 1.0 if x == 0 else 0.0)
    return gauss / (2.0 * math.sqrt(math.pi * D * t))


def _quad(func, tol: float, limit: int, what: str) -> KernelValue:
    value, error, info = integrate.quad(func, 0.0, HALF_PI, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)[:3]
    logger.debug("%s: %d subintervals, error estimate %.3g", what, info["last"], error)
    if error > tol:
        raise AccuracyError(
            f"{what}: error estimate {error:.3e} exceeds tol {tol:.3e} within {limit} subdivision(s)",
            value=value,
            error=error,
            tol=tol,
        )
    return KernelValue(value, error)


def h1(x: float, t: float, p: FhrParams, tol: float = DEFAULT_TOL,
       max_subdivisions: int = DEFAULT_SUBDIVISIONS) -> KernelValue:
    """H1(x, t) with quadrature error estimate.

    Raises:
        DomainError: t <= 0, D <= 0, eps < 0 or tol <= 0.
        AccuracyError: quadrature did not reach ``tol`` (carries the best estimate).
    """
    _check_point(t, p, tol)
    damped = float(heat_kernel(x, t, p.D)) * math.exp(-p.a * t)
    if p.eps == 0.0:
        return KernelValue(damped, 0.0)
    root_eps = math.sqrt(p.eps)

    def integrand(theta: float) -> float:
        s, c = math.sin(theta), math.cos(theta)
        y = t * s * s
        return (
            _scaled_heat(x, t, s, p.D) * s
            * math.exp(-p.a * y - p.eta * t * c * c)
            * 2.0 * t * root_eps
            * bessel_j1(2.0 * root_eps * t * s * c)
        )

    correction = _quad(integrand, tol, max_subdivisions, f"H1 correction at (x={x}, t={t})")
    return KernelValue(damped - correction.value, correction.error)


def _h1_profile(x: float, t: float, p: FhrParams, tol: float, limit: int) -> Tuple[Chebyshev, float]:
    """Chebyshev interpolant of theta -> sin(theta) H1(x, t sin^2 theta) on [0, pi/2]."""

    def phi(thetas: np.ndarray) -> np.ndarray:
        out = np.empty_like(thetas)
        for i, theta in enumerate(thetas):
            s = math.sin(theta)
            out[i] = 0.0 if s == 0.0 and x != 0.0 else _scaled_h1(x, t, s, p, tol, limit)
        return out

    probe = np.linspace(0.0, HALF_PI, 65)
    degree = 16
    current = Chebyshev.interpolate(phi, degree, domain=[0.0, HALF_PI])
    while True:
        degree *= 2
        finer = Chebyshev.interpolate(phi, degree, domain=[0.0, HALF_PI])
        change = float(np.max(np.abs(finer(probe) - current(probe))))
        current = finer
        if change <= tol or degree >= MAX_CHEB_DEGREE:
            return current, change


def _scaled_h1(x: float, t: float, s: float, p: FhrParams, tol: float, limit: int) -> float:
    """sin(theta) * H1(x, t sin^2 theta) including the theta = 0 limit."""
    if s == 0.0:
        # Only the heat term survives: sin(theta) G(0, t sin^2 theta) -> 1 / (2 sqrt(pi D t)).
        return float(_scaled_heat(x, t, 0.0, p.D))
    return s * h1(x, t * s * s, p, tol, limit).value


def h2(x: float, t: float, p: FhrParams, tol: float = DEFAULT_TOL,
       max_subdivisions: int = DEFAULT_SUBDIVISIONS) -> KernelValue:
    """H2(x, t) = int_0^t H1(x, y) e^{-delta d (t-y)} sqrt(delta y/(t-y)) J1(2 sqrt(delta y (t-y))) dy.

    The inner H1 values are sampled once per query on a Chebyshev grid in theta
    (degree doubled until the interpolant settles to ``tol / 10``).
    """
    _check_point(t, p, tol)
    if p.delta == 0.0:
        return KernelValue(0.0, 0.0)
    inner_tol = tol / 10.0
    profile, interp_change = _h1_profile(x, t, p, inner_tol, max_subdivisions)
    root_delta = math.sqrt(p.delta)

    def weight(theta: float) -> float:
        s, c = math.sin(theta), math.cos(theta)
        return s * math.exp(-p.gamma * t * c * c) * 2.0 * t * root_delta * bessel_j1(2.0 * root_delta * t * s * c)

    outer = _quad(lambda theta: float(profile(theta)) * weight(theta), inner_tol, max_subdivisions,
                  f"H2 at (x={x}, t={t})")
    weight_mass = integrate.quad(lambda theta: abs(weight(theta)), 0.0, HALF_PI)[0]
    error = outer.error + (interp_change + inner_tol) * weight_mass
    if error > tol:
        raise AccuracyError(f"H2 at (x={x}, t={t}): error estimate {error:.3e} exceeds tol {tol:.3e}",
                            value=outer.value, error=error, tol=tol)
    return KernelValue(outer.value, error)


def h(x: float, t: float, p: FhrParams, tol: float = DEFAULT_TOL,
      max_subdivisions: int = DEFAULT_SUBDIVISIONS) -> KernelValue:
    """Composite kernel H = H1 - H2; each part gets half of ``tol``."""
    part1 = h1(x, t, p, tol / 2.0, max_subdivisions)
    part2 = h2(x, t, p, tol / 2.0, max_subdivisions)
    return KernelValue(part1.value - part2.value, part1.error + part2.error)


@dataclass
class KernelField:
    """H, H1, H2 sampled on an (x, t) grid; arrays are indexed [t, x]."""

    x: np.ndarray
    t: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    err1: np.ndarray
    err2: np.ndarray
    tol: float
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def H(self) -> np.ndarray:
        return self.H1 - self.H2

    @property
    def error(self) -> np.ndarray:
        return self.err1 + self.err2

    def component(self, name: str) -> np.ndarray:
        try:
            return {"H": self.H, "H1": self.H1, "H2": self.H2}[name]
        except KeyError:
            raise DomainError(f"unknown kernel component {name!r}") from None

    def to_csv(self, path: Union[str, Path], component: str = "H") -> Path:
        return write_field_csv(path, self.x, self.t, self.component(component))

    def to_binary(self, path: Union[str, Path], component: str = "H") -> Path:
        return write_field_binary(path, self.x, self.t, self.component(component))


def _node(args: Tuple[float, float, Dict[str, float], float, int]) -> Tuple[float, float, float, float]:
    x, t, values, tol, limit = args
    p = FhrParams(**values)
    part1 = h1(x, t, p, tol / 2.0, limit)
    part2 = h2(x, t, p, tol / 2.0, limit)
    return part1.value, part1.error, part2.value, part2.error


def kernel_field(
    p: FhrParams,
    xs: Sequence[float],
    ts: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_subdivisions: int = DEFAULT_SUBDIVISIONS,
    jobs: Optional[int] = 1,
) -> KernelField:
    """Evaluate H1 and H2 on every (x, t) node, in parallel over nodes when ``jobs`` != 1."""
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    values = p.to_dict()
    nodes = [(float(x), float(t), values, tol, max_subdivisions) for t in ts for x in xs]
    workers = jobs or os.cpu_count() or 1
    logger.info("Evaluating kernel on %d x %d nodes with %d worker(s)", len(ts), len(xs), workers)
    if workers == 1:
        results: List[Tuple[float, ...]] = [_node(n) for n in nodes]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_node, nodes, chunksize=max(1, len(nodes) // (4 * workers))))
    table = np.array(results, dtype=float).reshape(len(ts), len(xs), 4)
    return KernelField(
        x=xs,
        t=ts,
        H1=table[..., 0],
        H2=table[..., 2],
        err1=table[..., 1],
        err2=table[..., 3],
        tol=tol,
        meta={"D": p.D, "a": p.a, "eps": p.eps, "delta": p.delta},
    )
