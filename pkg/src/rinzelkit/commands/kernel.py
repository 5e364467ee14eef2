"""``kernel``: tabulate H1, H2 and H = H1 - H2 on an (x, t) grid."""

import logging
from typing import Any, Dict

import numpy as np

from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.errors import ConfigError
from rinzelkit.kernel.fundamental import heat_kernel, kernel_field

logger = logging.getLogger(__name__)


def _axis(spec: Dict[str, Any]) -> np.ndarray:
    return np.linspace(spec["start"], spec["stop"], spec["num"])


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params")
    settings = config.kernel
    missing = [f"kernel.{key}" for key in ("x", "t") if settings.get(key) is None]
    if missing:
        raise ConfigError(f"Missing required config keys: {', '.join(missing)}")
    p = config.params
    xs, ts = _axis(settings["x"]), _axis(settings["t"])

    field = kernel_field(p, xs, ts, settings["tol"], settings["max_subdivisions"], ctx.jobs)
    for component in ("H", "H1", "H2"):
        field.to_csv(ctx.output(f"kernel_{component}.csv"), component)
    field.to_binary(ctx.output("kernel_H.bin"))

    damped = heat_kernel(xs[None, :], ts[:, None], p.D) * np.exp(-p.a * ts)[:, None]
    summary = {
        "command": "kernel",
        "params": p.to_dict(),
        "nx": len(xs),
        "nt": len(ts),
        "tol": settings["tol"],
        "max_error_estimate": float(np.max(field.error)),
        "max_deviation_from_damped_heat": float(np.max(np.abs(field.H - damped))),
        "files": ["kernel_H.csv", "kernel_H1.csv", "kernel_H2.csv", "kernel_H.bin"],
    }
    logger.info("Kernel tabulated; largest error estimate %.3e", summary["max_error_estimate"])
    write_json(ctx.output("kernel.json"), summary)
    return summary
