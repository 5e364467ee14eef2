"""``simulate``: integrate the FHR system and summarise the trajectory."""

import logging
from typing import Any, Dict

import numpy as np

from rinzelkit.analysis.bursts import burst_summary
from rinzelkit.analysis.certificate import certificate
from rinzelkit.analysis.verify import verify_trajectory
from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.errors import DomainError
from rinzelkit.model.dynamics import energy_of
from rinzelkit.solvers.integrator import simulate

logger = logging.getLogger(__name__)


def _energy_check(ctx: RunContext, traj) -> Dict[str, Any]:
    """Compare the run against E0 + C1/C when the parameters admit a certificate."""
    config = ctx.config
    if config.form != "general":
        return {"checked": False, "reason": "energy estimate covers the general form only"}
    try:
        cert = certificate(config.params, config.certificate["eps1"])
    except DomainError as exc:
        return {"checked": False, "reason": str(exc)}
    if not cert.valid:
        return {"checked": False, "reason": cert.reason}
    report = verify_trajectory(cert, traj)
    if not report.passed:
        logger.warning("Trajectory exceeds the energy estimate (%d violations)", report.violations)
    return {"checked": True, "bound": report.E0 + cert.ratio, **report.to_dict()}


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params", "initial_state", "t_final")
    if config.t_final <= config.t_start:
        raise DomainError(f"t_final={config.t_final} must exceed t_start={config.t_start}")

    result = simulate(
        config.params,
        config.initial_state,
        config.t_final,
        config.integrator,
        form=config.form,
        t_start=config.t_start,
    )
    traj = result.trajectory
    csv_path = traj.to_csv(ctx.output("trajectory.csv"))

    times, states = traj.dense_samples(4)
    columns = np.column_stack([states, energy_of(states)])
    names = ("u", "w", "y", "E")
    summary = {
        "command": "simulate",
        "params": config.params.to_dict(),
        "initial_state": dict(zip(("u", "w", "y"), config.initial_state.to_array())),
        "form": config.form,
        "t_start": config.t_start,
        "t_final": config.t_final,
        "integrator": config.integrator.to_dict(),
        "stats": traj.stats.to_dict(),
        "min": dict(zip(names, columns.min(axis=0))),
        "max": dict(zip(names, columns.max(axis=0))),
        "bursts": burst_summary(traj).to_dict(),
        "energy_check": _energy_check(ctx, traj),
        "trajectory_csv": csv_path.name,
    }
    write_json(ctx.output("summary.json"), summary)
    return summary
