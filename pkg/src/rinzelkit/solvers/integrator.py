"""Adaptive initial-value integration with dense output and event location."""

import enum
import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from rinzelkit.errors import (
    ConfigError,
    DomainError,
    MaxStepsExceededError,
    PreconditionError,
    StepSizeUnderflowError,
)
from rinzelkit.model.dynamics import jacobian_field, vector_field
from rinzelkit.model.params import FhrParams, State
from rinzelkit.solvers import dopri, rosenbrock
from rinzelkit.solvers.trajectory import FHR_COLUMNS, IntegrationStats, Trajectory

logger = logging.getLogger(__name__)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

RhsFn = Callable[[float, np.ndarray], np.ndarray]
JacFn = Callable[[float, np.ndarray], Any]


class Method(str, enum.Enum):
    DOPRI5 = "dopri5"
    ROSENBROCK = "rosenbrock"


class Direction(str, enum.Enum):
    RISING = "rising"
    FALLING = "falling"
    ANY = "any"


@dataclass(frozen=True)
class IntegratorConfig:
    """Error control and step bounds.

    With ``adaptive=False`` the integrator takes fixed steps of ``h_init``
    (the last one clipped to land on the final time) and skips error control.
    """

    method: Method = Method.DOPRI5
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    h_init: Optional[float] = None
    h_min: float = 1e-12
    h_max: float = math.inf
    max_steps: int = 1_000_000
    event_tol: float = 1e-10
    adaptive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        problems = []
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            problems.append("abs_tol and rel_tol must be > 0")
        if not (0 < self.h_min <= self.h_max):
            problems.append("need 0 < h_min <= h_max")
        if self.h_init is not None and not self.h_init > 0:
            problems.append("h_init must be > 0")
        if self.max_steps <= 0:
            problems.append("max_steps must be > 0")
        if not self.event_tol > 0:
            problems.append("event_tol must be > 0")
        if not self.adaptive and self.h_init is None:
            problems.append("fixed-step mode needs h_init")
        if problems:
            raise ConfigError("Invalid integrator settings: " + "; ".join(problems))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "IntegratorConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"Unknown integrator keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"Invalid integrator settings: {exc}") from exc

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["method"] = self.method.value
        return out


@dataclass(frozen=True)
class Event:
    """Sign change of ``predicate(t, y)`` along the dense output."""

    predicate: Callable[[float, np.ndarray], float]
    direction: Direction = Direction.ANY
    terminal: bool = False
    name: str = ""

    def triggers(self, g_old: float, g_new: float) -> bool:
        rising = g_old < 0.0 <= g_new
        falling = g_old > 0.0 >= g_new
        if self.direction == Direction.RISING:
            return rising
        if self.direction == Direction.FALLING:
            return falling
        return rising or falling


@dataclass
class EventRecord:
    index: int
    name: str
    t: float
    y: np.ndarray
    residual: float


@dataclass
class IntegrationResult:
    trajectory: Trajectory
    events: List[EventRecord] = field(default_factory=list)
    terminated: bool = False


@dataclass
class EventOutcome:
    """Result of ``integrate_to_event``; ``found`` is False for the no-event outcome."""

    found: bool
    t: Optional[float]
    y: Optional[np.ndarray]
    trajectory: Trajectory

    @property
    def no_event(self) -> bool:
        return not self.found


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


def _initial_step(f: RhsFn, t0: float, y0: np.ndarray, f0: np.ndarray, order: int, cfg: IntegratorConfig) -> float:
    """Starting step from the size of y0, f(y0) and a second-derivative probe."""
    scale = cfg.abs_tol + np.abs(y0) * cfg.rel_tol
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(t0 + h0, y0 + h0 * f0)
    if not np.all(np.isfinite(f1)):
        return h0
    d2 = _rms((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100.0 * h0, h1)


class _DopriStepper:
    error_order = dopri.ERROR_ORDER
    order = dopri.ORDER

    def __init__(self, f: RhsFn, jac: Optional[JacFn], stats: IntegrationStats, autonomous: bool):
        self.f = f

    def prepare(self, t: float, y: np.ndarray, f0: np.ndarray) -> None:
        pass

    def attempt(self, t, y, t_new, f0):
        y_new, f_new, err, K = dopri.dopri_step(self.f, t, y, t_new - t, f0)
        return y_new, f_new, err, lambda: dopri.DopriSegment(t, t_new, y, y_new, K)


class _RosenbrockStepper:
    error_order = rosenbrock.ERROR_ORDER
    order = rosenbrock.ORDER

    def __init__(self, f: RhsFn, jac: JacFn, stats: IntegrationStats, autonomous: bool):
        self.f = f
        self.jac = jac
        self.stats = stats
        self.autonomous = autonomous
        self.J = None
        self.T = None

    def prepare(self, t: float, y: np.ndarray, f0: np.ndarray) -> None:
        # Jacobian and df/dt are frozen at the accepted point and reused across rejections.
        self.J = self.jac(t, y)
        self.stats.n_jac += 1
        if self.autonomous:
            self.T = np.zeros_like(y)
        else:
            self.T = rosenbrock.time_derivative(self.f, t, y, f0)

    def attempt(self, t, y, t_new, f0):
        self.stats.n_lu += 1
        y_new, f_new, err, (k1, k2) = rosenbrock.rosenbrock_step(self.f, self.J, t, y, t_new - t, f0, self.T)
        return y_new, f_new, err, lambda: rosenbrock.RosenbrockSegment(t, t_new, y, y_new, k1, k2)


_STEPPERS = {Method.DOPRI5: _DopriStepper, Method.ROSENBROCK: _RosenbrockStepper}


def _locate(event: Event, segment, t_old: float, t_new: float, y_new: np.ndarray) -> Tuple[float, np.ndarray, float]:
    """Brent root of the predicate on one step's interpolant."""

    def g(tau: float) -> float:
        return float(event.predicate(tau, segment(tau)))

    g_a, g_b = g(t_old), g(t_new)
    if g_a * g_b > 0.0:
        # Sign change only visible at the stored knot value.
        return t_new, y_new, float(event.predicate(t_new, y_new))
    root = optimize.brentq(g, t_old, t_new, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    y_root = segment(root)
    return root, y_root, float(event.predicate(root, y_root))


def integrate(
    rhs: RhsFn,
    t0: float,
    tf: float,
    y0: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    *,
    jac: Optional[JacFn] = None,
    events: Sequence[Event] = (),
    autonomous: bool = False,
    names: Tuple[str, ...] = (),
) -> IntegrationResult:
    """Integrate y' = rhs(t, y) from t0 to tf.

    Error control is per component: a step is accepted when the RMS of
    err / (abs_tol + rel_tol * max(|y|, |y_new|)) is at most 1. Step sizes follow
    a PI controller with safety 0.9 and growth clamped to [0.2, 5]; no growth is
    allowed on the step right after a rejection.

    Args:
        rhs: Vector field f(t, y) returning an array shaped like y.
        t0: Initial time.
        tf: Final time, strictly greater than t0.
        y0: Initial state.
        cfg: Integrator settings (defaults to ``IntegratorConfig()``).
        jac: Jacobian J(t, y), dense or scipy.sparse; required by the Rosenbrock method.
        events: Events located on the dense output of every accepted step.
        autonomous: Skip the df/dt probe of the Rosenbrock method.
        names: Column names for the trajectory.

    Returns:
        The trajectory, the located events in time order and whether a terminal
        event stopped the run.

    Raises:
        DomainError: tf <= t0, non-finite y0, or the rhs returns non-finite values.
        PreconditionError: Rosenbrock method requested without a Jacobian.
        StepSizeUnderflowError: the controller asked for a step below h_min.
        MaxStepsExceededError: more than max_steps accepted steps.
    """
    cfg = cfg or IntegratorConfig()
    t0, tf = float(t0), float(tf)
    if not (math.isfinite(t0) and math.isfinite(tf)) or tf <= t0:
        raise DomainError(f"need finite t0 < tf (got t0={t0}, tf={tf})")
    y = np.array(y0, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise DomainError("initial state must be finite", t=t0)
    if cfg.method == Method.ROSENBROCK and jac is None:
        raise PreconditionError("the rosenbrock method needs a Jacobian")

    stats = IntegrationStats(method=cfg.method.value, abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        stats.n_rhs += 1
        return np.asarray(rhs(t, x), dtype=float)

    stepper = _STEPPERS[cfg.method](f, jac, stats, autonomous)
    q = stepper.error_order + 1
    alpha, beta = 0.7 / q, 0.4 / q

    t = t0
    f0 = f(t, y)
    if f0.shape != y.shape:
        raise DomainError(f"rhs returned shape {f0.shape}, expected {y.shape}")
    if not np.all(np.isfinite(f0)):
        raise DomainError(f"rhs returned non-finite values at t={t}", t=t)

    if cfg.h_init is not None:
        h = cfg.h_init
    else:
        h = _initial_step(f, t, y, f0, stepper.order, cfg)
    h = min(max(h, cfg.h_min), cfg.h_max)

    ts: List[float] = [t]
    ys: List[np.ndarray] = [y]
    segments = []
    records: List[EventRecord] = []
    g_prev = [float(ev.predicate(t, y)) for ev in events]
    err_prev = 1e-4
    rejected_last = False
    nonfinite_at: Optional[float] = None
    terminated = False

    stepper.prepare(t, y, f0)
    while t < tf:
        if stats.n_steps >= cfg.max_steps:
            raise MaxStepsExceededError(
                f"max_steps={cfg.max_steps} reached at t={t} before tf={tf}", t=t, y=y.copy(), n_steps=stats.n_steps
            )
        if h < cfg.h_min:
            if nonfinite_at is not None:
                raise DomainError(f"rhs returned non-finite values near t={nonfinite_at}", t=nonfinite_at)
            raise StepSizeUnderflowError(
                f"step size {h:.3e} fell below h_min={cfg.h_min:.3e} at t={t} (stiffness or blow-up)",
                t=t,
                y=y.copy(),
            )
        h = min(h, cfg.h_max)
        t_new = tf if h >= tf - t else t + h
        if t_new <= t:
            raise StepSizeUnderflowError(f"step size {h:.3e} is below the time resolution at t={t}", t=t, y=y.copy())

        y_new, f_new, err_vec, make_segment = stepper.attempt(t, y, t_new, f0)
        finite = bool(np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new)) and np.all(np.isfinite(err_vec)))

        if not finite:
            if not cfg.adaptive:
                raise DomainError(f"rhs returned non-finite values in step [{t}, {t_new}]", t=t)
            nonfinite_at = t
            stats.n_rejected += 1
            rejected_last = True
            h = (t_new - t) * MIN_FACTOR
            logger.debug("Rejected step at t=%g: non-finite trial values", t)
            continue

        if cfg.adaptive:
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(err_vec / scale)
            if err > 1.0:
                stats.n_rejected += 1
                rejected_last = True
                factor = max(MIN_FACTOR, SAFETY * err ** (-1.0 / q))
                h = (t_new - t) * factor
                logger.debug("Rejected step at t=%g (err=%.3g), retrying with h=%.3g", t, err, h)
                continue
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** (-alpha) * err_prev**beta
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            if rejected_last:
                factor = min(1.0, factor)
            err_prev = max(err, 1e-4)
            h_next = (t_new - t) * factor
        else:
            h_next = cfg.h_init

        segment = make_segment()
        stats.n_steps += 1
        rejected_last = False
        nonfinite_at = None

        if events:
            hits = []
            for i, ev in enumerate(events):
                g_new = float(ev.predicate(t_new, y_new))
                if ev.triggers(g_prev[i], g_new):
                    t_ev, y_ev, residual = _locate(ev, segment, t, t_new, y_new)
                    if abs(residual) > cfg.event_tol:
                        logger.debug("Event %s located with |g|=%.3g above event_tol", ev.name or i, residual)
                    hits.append(EventRecord(index=i, name=ev.name, t=t_ev, y=y_ev, residual=residual))
                g_prev[i] = g_new
            hits.sort(key=lambda r: r.t)
            for hit in hits:
                records.append(hit)
                if events[hit.index].terminal:
                    t_new, y_new = hit.t, hit.y
                    terminated = True
                    break

        ts.append(t_new)
        ys.append(y_new)
        segments.append(segment)
        t, y, f0 = t_new, y_new, f_new
        if terminated:
            break
        h = h_next
        stepper.prepare(t, y, f0)

    trajectory = Trajectory(
        t=np.array(ts),
        y=np.vstack(ys),
        segments=segments,
        stats=stats,
        names=names,
    )
    logger.debug(
        "Integrated [%g, %g] with %s: %d steps, %d rejected, %d rhs calls",
        t0, t, cfg.method.value, stats.n_steps, stats.n_rejected, stats.n_rhs,
    )
    return IntegrationResult(trajectory=trajectory, events=records, terminated=terminated)


def integrate_to_event(
    rhs: RhsFn,
    t0: float,
    tf: float,
    y0: Sequence[float],
    event: Event,
    cfg: Optional[IntegratorConfig] = None,
    *,
    jac: Optional[JacFn] = None,
    autonomous: bool = False,
) -> EventOutcome:
    """Integrate until ``event`` first fires; no crossing before tf is a regular outcome."""
    result = integrate(rhs, t0, tf, y0, cfg, jac=jac, events=[replace(event, terminal=True)], autonomous=autonomous)
    if result.terminated:
        hit = result.events[-1]
        return EventOutcome(found=True, t=hit.t, y=hit.y, trajectory=result.trajectory)
    return EventOutcome(found=False, t=None, y=None, trajectory=result.trajectory)


def simulate(
    p: FhrParams,
    s0: State,
    t_final: float,
    cfg: Optional[IntegratorConfig] = None,
    *,
    form: str = "general",
    t_start: float = 0.0,
    events: Sequence[Event] = (),
) -> IntegrationResult:
    """Integrate the FHR system from ``s0``; the trajectory remembers ``p``."""
    result = integrate(
        vector_field(p, form),
        t_start,
        t_final,
        s0.to_array(),
        cfg,
        jac=jacobian_field(p, form),
        events=events,
        autonomous=True,
        names=FHR_COLUMNS,
    )
    result.trajectory.params = p
    result.trajectory.extra["form"] = form
    return result
