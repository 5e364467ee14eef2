"""Recompute the published worked example and set every number beside its quoted value.

Nothing is reconciled: when a quoted number does not follow from the formulas
the row is marked ``discrepancy`` and both values are kept.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional

from rinzelkit.analysis.certificate import admissible_eps1, feasible_a_interval, margins, source_constant
from rinzelkit.model.params import PAPER_CONSTANTS, FhrParams

logger = logging.getLogger(__name__)

EXAMPLE_A = -0.98
CHOSEN_A = -0.9769059892
C1_A = -1.0230940107
QUOTED_SLACK = 0.007199999997


@dataclass
class ReplicationRow:
    name: str
    description: str
    computed: float
    quoted: Optional[float]
    tol: float
    note: str = ""

    @property
    def abs_diff(self) -> Optional[float]:
        return None if self.quoted is None else abs(self.computed - self.quoted)

    @property
    def rel_diff(self) -> Optional[float]:
        if self.quoted is None or self.quoted == 0:
            return None
        return self.abs_diff / abs(self.quoted)

    @property
    def status(self) -> str:
        if self.quoted is None:
            return "info"
        return "match" if self.abs_diff <= self.tol else "discrepancy"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "computed": self.computed,
            "quoted": self.quoted,
            "abs_diff": self.abs_diff,
            "rel_diff": self.rel_diff,
            "tol": self.tol,
            "status": self.status,
            "note": self.note,
        }


@dataclass
class ReplicationReport:
    rows: List[ReplicationRow] = field(default_factory=list)

    def row(self, name: str) -> ReplicationRow:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)

    @property
    def discrepancies(self) -> List[str]:
        return [row.name for row in self.rows if row.status == "discrepancy"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "discrepancies": self.discrepancies,
        }

    def to_text(self) -> str:
        header = f"{'name':<22} {'computed':>24} {'quoted':>24} {'abs diff':>11} {'status':<12}"
        lines = [header, "-" * len(header)]
        for row in self.rows:
            quoted = "-" if row.quoted is None else repr(row.quoted)
            diff = "-" if row.abs_diff is None else f"{row.abs_diff:.3e}"
            lines.append(f"{row.name:<22} {row.computed!r:>24} {quoted:>24} {diff:>11} {row.status:<12}")
            if row.note:
                lines.append(f"    {row.note}")
        return "\n".join(lines) + "\n"


def exact_source_constant(values: Mapping[str, str], eps1: str = "0") -> Fraction:
    """C1 in exact rational arithmetic from decimal strings (no rounding anywhere)."""
    q = {key: Fraction(value) for key, value in values.items()}
    one_plus_a = 1 + q["a"]
    numerator = q["I"] ** 2 + (q["h"] * q["delta"]) ** 2 + (q["eps"] * q["c"]) ** 2
    denominator = 4 * Fraction(eps1) + 2 * q["k"] * one_plus_a**2
    tail = -q["a"] + q["beta"] * q["eps"] + q["delta"] * q["d"]
    return numerator / denominator + tail**2 * q["k"] / 2


def _decimal_constants(a: str) -> Dict[str, str]:
    return dict({key: repr(value) for key, value in PAPER_CONSTANTS.items()}, a=a)


def replicate() -> ReplicationReport:
    """Every number of the worked example: computed, quoted and their difference."""
    base = FhrParams.paper_set(a=EXAMPLE_A)
    rows: List[ReplicationRow] = []

    def add(name, description, computed, quoted, tol, note=""):
        rows.append(ReplicationRow(name, description, float(computed), quoted, tol, note))

    add("eta", "eta = beta * eps", base.eta, 0.1008, 1e-15)
    add("gamma", "gamma = delta * d", base.gamma, 0.5, 1e-15)
    add("eps_penalty", "|1 - eps| / 2", abs(1 - base.eps) / 2, 0.1, 1e-15)
    add("delta_penalty", "|1 - delta| / 2", abs(1 - base.delta) / 2, 0.25, 1e-15)
    lead = min(base.eta - abs(base.eps - 1) / 2, base.gamma - abs(1 - base.delta) / 2)
    add("lead_margin", "min(f, g) at a = -1", lead, 0.0008, 1e-15)

    interval = feasible_a_interval(base)
    half_width = math.sqrt(3.0) / 75.0
    add("a_lower", "feasible a, lower end (10 digits)", interval.lower, -1.023094011, 1e-9,
        f"closed form -1 - sqrt(3)/75 = {-1 - half_width!r}")
    add("a_upper", "feasible a, upper end (10 digits)", interval.upper, -0.9769059892, 1e-9)
    add("a_lower_13", "feasible a, lower end (13 digits)", interval.lower, -1.023094010768, 1e-12)
    add("a_upper_13", "feasible a, upper end (13 digits)", interval.upper, -0.9769059892324, 1e-12)

    add("eps1_upper", "admissible eps1 upper end at a = -0.98", admissible_eps1(base).upper, 0.0002, 1e-12,
        "strict inequality: the endpoint itself is marginal, not admissible")

    chosen = FhrParams.paper_set(a=CHOSEN_A)
    f_chosen = margins(chosen).f
    add("f_at_chosen_a", "f at a = -0.9769059892", f_chosen, None, 0.0,
        "negative: the chosen a lies just outside the open feasible interval" if f_chosen <= 0 else "")
    one_plus_a = 1.0 + CHOSEN_A
    c_constant = 0.0008 - 1.5 * one_plus_a * one_plus_a
    add("C_constant", "0.0008 - 1.5 (1 + a)^2 at the chosen a", c_constant, 0.00719999999998, 1e-14,
        "quoted constant does not follow from C = 2[0.0008 - 3(a+1)^2/2 - eps1]")
    add("C_at_quoted_slack", "C = 2[0.0008 - 1.5(1+a)^2 - eps1] with eps1 = 0.007199999997",
        2.0 * (c_constant - QUOTED_SLACK), 1.999999125e-12, 1e-20)

    c1_params = FhrParams.paper_set(a=C1_A)
    c1_float = source_constant(c1_params, 0.0)
    c1_exact = exact_source_constant(_decimal_constants(repr(C1_A)), "0")
    add("C1", "C1 at a = -1.0230940107, eps1 = 0", c1_float, 85.7089051, 5e-8,
        "formula evaluation; the quoted value is not reproduced")
    add("C1_exact", "C1 in exact rational arithmetic", c1_float, float(c1_exact), 1e-9 * float(c1_exact),
        "float evaluation against the rational oracle")

    quoted_c, quoted_c1 = 2e-12, 85.7089051
    add("R_magnitude", "sqrt(2 C1 / C) from the quoted C = 2e-12 and C1", math.sqrt(2 * quoted_c1 / quoted_c),
        9.2579e6, 50.0)
    add("R_magnitude_raw", "sqrt(2 C1 / C) with C = 1.999999125e-12",
        math.sqrt(2 * quoted_c1 / 1.999999125e-12), 9.2579e6, 50.0)
    add("R_magnitude_formula", "sqrt(2 C1 / C) with the recomputed C1 and quoted C",
        math.sqrt(2 * c1_float / quoted_c), None, 0.0)

    report = ReplicationReport(rows)
    if report.discrepancies:
        logger.info("Replication discrepancies: %s", ", ".join(report.discrepancies))
    return report
