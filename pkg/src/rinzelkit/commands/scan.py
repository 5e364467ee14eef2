"""``scan``: certificate region map over one or two parameter axes."""

from typing import Any, Dict

from rinzelkit.analysis.scan import scan_certificates, write_scan_csv
from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.errors import ConfigError


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params")
    settings = config.scan
    if settings.get("x") is None:
        raise ConfigError("Missing required config keys: scan.x")
    rows = scan_certificates(config.params, settings["x"], settings.get("y"), settings["eps1"], ctx.jobs)
    csv_path = write_scan_csv(rows, ctx.output("scan.csv"))
    valid = sum(1 for row in rows if row["valid"])
    summary = {
        "command": "scan",
        "cells": len(rows),
        "valid_cells": valid,
        "axes": [
            {"name": ax.name, "start": ax.start, "stop": ax.stop, "num": ax.num}
            for ax in (settings["x"], settings.get("y")) if ax is not None
        ],
        "scan_csv": csv_path.name,
    }
    write_json(ctx.output("scan_summary.json"), summary)
    return summary
