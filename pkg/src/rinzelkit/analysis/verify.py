"""Check a simulated trajectory against the energy estimates of a certificate."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import optimize

from rinzelkit.analysis.certificate import BoundsCertificate, energy_envelope, entry_time
from rinzelkit.errors import InvalidCertificateError
from rinzelkit.model.dynamics import energy_of, energy_rate_of
from rinzelkit.solvers.trajectory import Trajectory

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-7


@dataclass
class VerificationReport:
    """Worst excesses and violation counts over the dense samples of one trajectory.

    Violations are counted against ``tol * (1 + |E|)`` at each sample.
    """

    n_samples: int
    E0: float
    max_envelope_excess: float
    max_bound_excess: float
    max_rate_excess: float
    envelope_violations: int
    bound_violations: int
    rate_violations: int
    tol: float
    r2: Optional[float] = None
    tau: Optional[float] = None
    entry_measured: Optional[float] = None
    entry_ok: Optional[bool] = None

    @property
    def violations(self) -> int:
        return (
            self.envelope_violations
            + self.bound_violations
            + self.rate_violations
            + (1 if self.entry_ok is False else 0)
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "E0": self.E0,
            "max_envelope_excess": self.max_envelope_excess,
            "max_bound_excess": self.max_bound_excess,
            "max_rate_excess": self.max_rate_excess,
            "envelope_violations": self.envelope_violations,
            "bound_violations": self.bound_violations,
            "rate_violations": self.rate_violations,
            "tol": self.tol,
            "r2": self.r2,
            "tau": self.tau,
            "entry_measured": self.entry_measured,
            "entry_ok": self.entry_ok,
            "passed": self.passed,
        }


def _first_entry(traj: Trajectory, times: np.ndarray, E: np.ndarray, r2: float) -> Optional[float]:
    inside = np.nonzero(E <= r2)[0]
    if len(inside) == 0:
        return None
    j = int(inside[0])
    if j == 0:
        return float(times[0])

    def excess(t: float) -> float:
        return float(energy_of(traj(t)) - r2)

    if excess(times[j - 1]) * excess(times[j]) > 0:
        return float(times[j])
    return float(optimize.brentq(excess, times[j - 1], times[j], xtol=1e-14, rtol=4 * np.finfo(float).eps))


def verify_trajectory(
    cert: BoundsCertificate,
    traj: Trajectory,
    tol: float = DEFAULT_TOL,
    per_step: int = 4,
    r2: Optional[float] = None,
) -> VerificationReport:
    """Sample ``traj`` and test the envelope, the uniform bound and dE/dt <= -C E + C1.

    With ``r2`` given and E0 > r2, the first time E drops to r2 is measured on
    the dense output and compared with the entry-time bound.

    Raises:
        InvalidCertificateError: the certificate is invalid or was built for
            other parameters than the trajectory.
    """
    cert.require_valid()
    if traj.params is not None and traj.params != cert.params:
        raise InvalidCertificateError("trajectory and certificate were built from different parameters")
    if traj.dim != 3:
        raise InvalidCertificateError(f"expected an FHR trajectory (3 components), got {traj.dim}")

    times, states = traj.dense_samples(per_step)
    E = energy_of(states)
    E0 = float(E[0])
    slack = tol * (1.0 + np.abs(E))

    envelope_excess = E - energy_envelope(cert, E0, times - times[0])
    bound_excess = E - (E0 + cert.ratio)
    rate_excess = energy_rate_of(cert.params, states) - (-cert.C * E + cert.C1)

    report = VerificationReport(
        n_samples=len(times),
        E0=E0,
        max_envelope_excess=float(np.max(envelope_excess)),
        max_bound_excess=float(np.max(bound_excess)),
        max_rate_excess=float(np.max(rate_excess)),
        envelope_violations=int(np.count_nonzero(envelope_excess > slack)),
        bound_violations=int(np.count_nonzero(bound_excess > slack)),
        rate_violations=int(np.count_nonzero(rate_excess > slack)),
        tol=tol,
    )

    if r2 is not None:
        entry = entry_time(cert, E0, r2)
        report.r2 = r2
        report.tau = entry.tau
        measured = _first_entry(traj, times, E, r2)
        report.entry_measured = None if measured is None else measured - float(times[0])
        if measured is None:
            # Not entered yet: only a violation if the horizon already passed tau.
            report.entry_ok = times[-1] - times[0] < entry.tau
        else:
            report.entry_ok = report.entry_measured <= entry.tau * (1.0 + tol) + tol

    if not report.passed:
        logger.debug("Verification found %d violations (E0=%g)", report.violations, E0)
    return report
