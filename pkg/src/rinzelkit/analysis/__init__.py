"""Energy estimates, trajectory verification, scans and the worked-example replication."""

from rinzelkit.analysis.certificate import (
    AbsorbingSet,
    BoundsCertificate,
    EntryTime,
    Interval,
    Margins,
    absorbing_set,
    admissible_eps1,
    certificate,
    energy_bound,
    energy_envelope,
    entry_time,
    feasible_a_interval,
    margins,
    optimize_eps1,
)
from rinzelkit.analysis.verify import VerificationReport, verify_trajectory

__all__ = [
    "AbsorbingSet",
    "BoundsCertificate",
    "EntryTime",
    "Interval",
    "Margins",
    "VerificationReport",
    "absorbing_set",
    "admissible_eps1",
    "certificate",
    "energy_bound",
    "energy_envelope",
    "entry_time",
    "feasible_a_interval",
    "margins",
    "optimize_eps1",
    "verify_trajectory",
]
