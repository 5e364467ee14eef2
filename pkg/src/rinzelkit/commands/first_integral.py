"""``first-integral``: the scalar reduction u' = u - u^3/3 + Q1 + Q2 exp(-beta eps t)."""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.config import Config
from rinzelkit.errors import ConfigError
from rinzelkit.model.dynamics import first_integral_offsets, reduced_bound, reduced_field, reduced_jacobian
from rinzelkit.model.params import FhrParams
from rinzelkit.solvers.integrator import integrate, simulate
from rinzelkit.solvers.trajectory import write_columns_csv

logger = logging.getLogger(__name__)

# Relative slack on the |u| bound for integration error.
BOUND_SLACK = 1e-6
# Deviations below this (times max(|Q2|, 1)) are integration noise and left out of the log fit.
DECAY_FLOOR = 1e-6


def _within(u: np.ndarray, bound: float) -> bool:
    return bool(np.all(np.isfinite(u)) and np.max(np.abs(u)) <= bound * (1.0 + BOUND_SLACK))


def _offsets(config: Config) -> Tuple[float, float, float]:
    """(Q1, Q2, u0): explicit values win; otherwise derived from the initial state under the constraints."""
    fi = config.first_integral
    if fi["Q1"] is not None:
        return fi["Q1"], fi["Q2"], fi["u0"]
    if config.initial_state is None:
        raise ConfigError("first_integral needs Q1 and Q2 or an initial_state to derive them from")
    q1, q2 = first_integral_offsets(config.params, config.initial_state, fi["constraint_tol"])
    return q1, q2, config.initial_state.u


def reduced_curve(config: Config, p: FhrParams, q1: float, q2: float, u0: float, times: np.ndarray) -> np.ndarray:
    """u(t) of the reduced equation sampled at ``times``."""
    result = integrate(
        reduced_field(p, q1, q2),
        0.0,
        float(times[-1]),
        [u0],
        config.integrator,
        jac=reduced_jacobian(p),
        names=("u",),
    )
    return result.trajectory(times)[:, 0]


def full_system_residual(config: Config, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    """Classic-system u(t), |u' + u^3/3 - u - Q1 - Q2 e^{-eta t}| and I - w + y - Q1 along it.

    u' + u^3/3 - u equals I - w + y on the classic system, so the residual is
    evaluated without differencing.
    """
    config.require("initial_state")
    p = config.params
    q1, q2 = first_integral_offsets(p, config.initial_state, config.first_integral["constraint_tol"])
    traj = simulate(p, config.initial_state, float(times[-1]), config.integrator, form="classic").trajectory
    states = traj(times)
    deviation = p.I - states[:, 1] + states[:, 2] - q1
    residual = np.abs(deviation - q2 * np.exp(-p.eta * times))
    return states[:, 0], residual, deviation, q1, q2


def decay_slope(times: np.ndarray, deviation: np.ndarray, floor: float) -> Optional[float]:
    """Least-squares slope of log|deviation| over the samples above ``floor``; None with fewer than 3."""
    magnitude = np.abs(deviation)
    keep = magnitude > floor
    if np.count_nonzero(keep) < 3:
        return None
    return float(np.polyfit(times[keep], np.log(magnitude[keep]), 1)[0])


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params")
    p = config.params
    fi = config.first_integral
    q1, q2, u0 = _offsets(config)
    times = np.linspace(0.0, fi["t_final"], fi["samples"])

    u = reduced_curve(config, p, q1, q2, u0, times)
    bound = reduced_bound(p, q1, q2, u0, fi["t_final"])
    header = ["t", "u"]
    columns = [times, u]
    summary: Dict[str, Any] = {
        "command": "first-integral",
        "Q1": q1,
        "Q2": q2,
        "u0": u0,
        "rate": p.eta,
        "t_final": fi["t_final"],
        "max_abs_u": float(np.max(np.abs(u))),
        "bound": bound,
        "bounded": _within(u, bound),
    }

    if fi["full_system"]:
        u_full, residual, deviation, fq1, fq2 = full_system_residual(config, times)
        header += ["u_full", "residual"]
        columns += [u_full, residual]
        slope = decay_slope(times, deviation, DECAY_FLOOR * max(abs(fq2), 1.0))
        summary["full_system"] = {
            "Q1": fq1,
            "Q2": fq2,
            "max_residual": float(np.max(residual)),
            "max_gap": float(np.max(np.abs(u_full - u))),
            "decay_slope": slope,
            "decay_slope_error": None if slope is None or p.eta == 0.0 else abs(slope + p.eta) / abs(p.eta),
        }
        logger.info("First-integral residual along the full system: %.3e", summary["full_system"]["max_residual"])
    write_columns_csv(ctx.output("first_integral.csv"), header, np.column_stack(columns))
    summary["csv"] = "first_integral.csv"

    sweep = fi["sweep"]
    if sweep is not None:
        values = np.linspace(sweep["start"], sweep["stop"], sweep["num"])
        curves = [reduced_curve(config, p, float(q), q2, u0, times) for q in values]
        bounds = [reduced_bound(p, float(q), q2, u0, fi["t_final"]) for q in values]
        names = ["t"] + [f"u(Q1={q:.6g})" for q in values]
        write_columns_csv(ctx.output("first_integral_sweep.csv"), names, np.column_stack([times] + curves))
        summary["sweep"] = {
            "Q1": values,
            "max_abs_u": [float(np.max(np.abs(c))) for c in curves],
            "bound": bounds,
            "bounded": all(_within(c, b) for c, b in zip(curves, bounds)),
            "csv": "first_integral_sweep.csv",
        }
    write_json(ctx.output("first_integral.json"), summary)
    return summary
