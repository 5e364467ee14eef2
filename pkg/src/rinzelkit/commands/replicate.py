"""``replicate``: recompute every number of the worked example next to its quoted value."""

import logging
from typing import Any, Dict

from rinzelkit.analysis.replicate import replicate
from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json

logger = logging.getLogger(__name__)


def run(ctx: RunContext) -> Dict[str, Any]:
    report = replicate()
    data = {"command": "replicate", **report.to_dict()}
    write_json(ctx.output("replication.json"), data)
    text_path = ctx.output("replication.txt")
    text_path.write_text(report.to_text(), encoding="utf-8")
    if report.discrepancies:
        logger.warning("Quoted values that the formulas do not reproduce: %s", ", ".join(report.discrepancies))
    return data
