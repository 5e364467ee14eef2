"""``certify``: boundedness certificate, feasible intervals and absorbing set."""

import logging
from typing import Any, Dict

from rinzelkit.analysis.certificate import (
    absorbing_set,
    admissible_eps1,
    certificate,
    feasible_a_interval,
    margins,
    optimize_eps1,
)
from rinzelkit.commands.engine import RunContext
from rinzelkit.commands.output import write_json
from rinzelkit.errors import InfeasibleError

logger = logging.getLogger(__name__)

DISPLAY_DIGITS = 10


def _display(interval) -> Dict[str, str]:
    if interval.empty:
        return {}
    return {
        "lower": f"{interval.lower:.{DISPLAY_DIGITS}f}",
        "upper": f"{interval.upper:.{DISPLAY_DIGITS}f}",
    }


def run(ctx: RunContext) -> Dict[str, Any]:
    config = ctx.config
    config.require("params")
    p = config.params
    settings = config.certificate
    optimize = bool(ctx.options.get("optimize_eps1")) or settings["optimize_eps1"]

    m = margins(p)
    feasible = feasible_a_interval(p)
    try:
        slack = admissible_eps1(p)
        slack_reason = ""
    except InfeasibleError as exc:
        slack, slack_reason = None, str(exc)

    if optimize and slack is not None:
        eps1, cert = optimize_eps1(p)
    else:
        eps1 = settings["eps1"]
        cert = certificate(p, eps1)

    report: Dict[str, Any] = {
        "command": "certify",
        "valid": cert.valid,
        "reason": cert.reason or slack_reason,
        "params": p.to_dict(),
        "margins": {"f": m.f, "g": m.g, "f_marginal": m.f_marginal, "g_marginal": m.g_marginal},
        "feasible_a": {**feasible.to_dict(), "display": _display(feasible)},
        "admissible_eps1": (
            {**slack.to_dict(), "display": _display(slack)} if slack is not None
            else {"empty": True, "reason": slack_reason}
        ),
        "eps1": eps1,
        "eps1_optimized": optimize and slack is not None,
        "certificate": cert.to_dict(),
        "absorbing_set": None,
    }
    if cert.valid:
        ball = absorbing_set(cert, settings["K0"], settings["E0"])
        report["absorbing_set"] = ball.to_dict()
        logger.info("Certificate valid: C=%.6g, C1=%.6g, R=%.6g", cert.C, cert.C1, ball.R)
    else:
        logger.info("No certificate for a=%r, eps1=%r: %s", p.a, eps1, report["reason"])
    write_json(ctx.output("certificate.json"), report)
    return report
