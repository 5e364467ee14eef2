"""``picard``: Picard solution of the integral equation, optionally checked against the method of lines."""

import logging
from typing import Any, Dict

import numpy as np

from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.kernel.picard import PicardGrid, picard_solve
from rinzelkit.kernel.source import SourceContext
from rinzelkit.pde.grid import SpatialGrid
from rinzelkit.pde.mol import solve_pde
from rinzelkit.solvers.trajectory import write_columns_csv

logger = logging.getLogger(__name__)

CROSSCHECK_TOL = 1e-3


def gaussian(amplitude: float, center: float, width: float):
    def profile(x: np.ndarray) -> np.ndarray:
        z = (x - center) / width
        return amplitude * np.exp(-z * z)

    return profile


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params")
    settings = config.picard
    p = config.params
    u0 = gaussian(**settings["u0"])
    source_ctx = SourceContext(p, w0=settings["w0"], y0=settings["y0"])
    grid = PicardGrid(settings["L"], settings["nx"], settings["nt"], settings["T"])

    solution = picard_solve(
        u0,
        source_ctx,
        grid,
        tol=settings["tol"],
        max_sweeps=settings["max_sweeps"],
        quadrature_order=settings["quadrature_order"],
        jobs=ctx.jobs,
    )
    for name in ("u", "w", "y"):
        solution.to_csv(ctx.output(f"picard_{name}.csv"), name)
    solution.to_binary(ctx.output("picard_u.bin"))
    write_columns_csv(
        ctx.output("picard_residuals.csv"),
        ("sweep", "residual"),
        np.column_stack([np.arange(1, len(solution.residuals) + 1), solution.residuals]),
    )
    summary: Dict[str, Any] = {
        "command": "picard",
        "params": p.to_dict(),
        "grid": {"L": grid.L, "nx": grid.nx, "nt": grid.nt, "T": grid.T},
        "residuals": solution.residuals,
        **solution.meta,
    }

    if ctx.options.get("crosscheck") or settings["crosscheck"]:
        mol_grid = SpatialGrid(grid.L, grid.nx, settings["boundary"])
        reference = solve_pde(p, mol_grid, u0, settings["w0"], settings["y0"], grid.T, config.integrator,
                              t_eval=grid.t)
        reference.to_csv(ctx.output("mol_u.csv"), "u")
        half_width = solution.meta["trusted_half_width"]
        gaps = {name: solution.sup_gap(reference, name, half_width) for name in ("u", "w", "y")}
        summary["crosscheck"] = {
            "boundary": mol_grid.boundary.value,
            "half_width": half_width,
            "gap": gaps,
            "tol": CROSSCHECK_TOL,
            "passed": gaps["u"] <= CROSSCHECK_TOL,
        }
        logger.info("Cross-check against the method of lines: sup gap in u %.3e", gaps["u"])
        if gaps["u"] > CROSSCHECK_TOL:
            logger.warning("Picard and method-of-lines solutions differ by %.3e", gaps["u"])
    write_json(ctx.output("picard.json"), summary)
    return summary
