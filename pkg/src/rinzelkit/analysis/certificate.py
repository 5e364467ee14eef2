"""Boundedness certificate and absorbing-set constants of the FHR system.

The energy E = (u^2 + w^2 + y^2)/2 satisfies dE/dt <= -C E + C1 whenever the
margins f and g exceed the slack eps1. All arithmetic squares (1 + a) once;
values within ``MARGINAL_ULPS`` units in the last place of the largest term
that produced them are reported as marginal instead of being given a sign.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import optimize

from rinzelkit.errors import (
    DomainError,
    HypothesisError,
    InfeasibleError,
    InvalidCertificateError,
    UnreachableThresholdError,
)
from rinzelkit.model.params import FhrParams

logger = logging.getLogger(__name__)

MARGINAL_ULPS = 1000
EPS1_SHRINK = 1e-9
GRID_POINTS = 10_000
EPS1_XATOL = 1e-12


def _is_marginal(value: float, *terms: float) -> bool:
    scale = max(abs(t) for t in terms)
    return abs(value) <= MARGINAL_ULPS * float(np.spacing(scale))


def _json_float(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def _require_k(p: FhrParams) -> None:
    if not p.k > 0:
        raise HypothesisError(f"boundedness analysis requires k > 0 (got k={p.k})")


@dataclass(frozen=True)
class Interval:
    """Real interval; ``empty`` intervals carry NaN endpoints."""

    lower: float
    upper: float
    closed_lower: bool = False
    closed_upper: bool = False
    empty: bool = False

    @classmethod
    def nothing(cls) -> "Interval":
        return cls(math.nan, math.nan, empty=True)

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.upper - self.lower

    def __contains__(self, x: float) -> bool:
        if self.empty:
            return False
        above = x >= self.lower if self.closed_lower else x > self.lower
        below = x <= self.upper if self.closed_upper else x < self.upper
        return above and below

    def to_dict(self) -> Dict[str, Any]:
        if self.empty:
            return {"empty": True}
        return {
            "empty": False,
            "lower": self.lower,
            "upper": self.upper,
            "closed_lower": self.closed_lower,
            "closed_upper": self.closed_upper,
        }


@dataclass(frozen=True)
class Margins:
    f: float
    g: float
    f_marginal: bool = False
    g_marginal: bool = False

    @property
    def smallest(self) -> float:
        return min(self.f, self.g)

    @property
    def marginal(self) -> bool:
        return self.f_marginal if self.f <= self.g else self.g_marginal


def _shape_term(p: FhrParams) -> float:
    one_plus_a = 1.0 + p.a
    return one_plus_a * one_plus_a * p.k / 2.0


def margins(p: FhrParams) -> Margins:
    """f = beta*eps - |eps-1|/2 - (1+a)^2 k/2 and g = delta*d - |1-delta|/2 - (1+a)^2 k/2.

    Raises:
        HypothesisError: k <= 0.
    """
    _require_k(p)
    shape = _shape_term(p)
    f_lead, f_pen = p.eta, abs(p.eps - 1.0) / 2.0
    g_lead, g_pen = p.gamma, abs(1.0 - p.delta) / 2.0
    f = f_lead - f_pen - shape
    g = g_lead - g_pen - shape
    return Margins(
        f=f,
        g=g,
        f_marginal=_is_marginal(f, f_lead, f_pen, shape),
        g_marginal=_is_marginal(g, g_lead, g_pen, shape),
    )


def feasible_a_interval(p: FhrParams) -> Interval:
    """Open set of thresholds a with min(f, g) > 0; ``p.a`` is ignored.

    The set is (-1 - s, -1 + s) with s = sqrt(2 min(beta*eps - |eps-1|/2, delta*d - |1-delta|/2) / k).
    """
    _require_k(p)
    m = min(p.eta - abs(p.eps - 1.0) / 2.0, p.gamma - abs(1.0 - p.delta) / 2.0)
    if m <= 0:
        return Interval.nothing()
    s = math.sqrt(2.0 * m / p.k)
    return Interval(-1.0 - s, -1.0 + s)


def admissible_eps1(p: FhrParams) -> Interval:
    """Slack values [0, min(f, g)) allowed by the strict certificate conditions.

    Raises:
        HypothesisError: k <= 0.
        InfeasibleError: min(f, g) <= 0, or is marginal (a on the feasible boundary).
    """
    m = margins(p)
    if m.smallest <= 0 or m.marginal:
        raise InfeasibleError(
            f"no admissible slack: min(f, g) = {m.smallest!r}"
            + (" (marginal)" if m.marginal else "")
        )
    return Interval(0.0, m.smallest, closed_lower=True, closed_upper=False)


@dataclass(frozen=True)
class BoundsCertificate:
    """All constants of the boundedness and absorbing-set estimates for one (params, eps1)."""

    params: FhrParams
    eps1: float
    f: float
    g: float
    A: float
    B: float
    B1: float
    C: float
    C1: float
    valid: bool
    reason: str = ""
    f_marginal: bool = False
    g_marginal: bool = False
    B_marginal: bool = False
    B1_marginal: bool = False

    @property
    def ratio(self) -> float:
        """Asymptotic energy level C1/C (infinite when C <= 0)."""
        return self.C1 / self.C if self.C > 0 else math.inf

    def require_valid(self) -> None:
        if not self.valid:
            raise InvalidCertificateError(f"certificate is not valid: {self.reason}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "eps1": self.eps1,
            "f": self.f,
            "g": self.g,
            "A": self.A,
            "B": self.B,
            "B1": self.B1,
            "C": self.C,
            "C1": _json_float(self.C1),
            "ratio": _json_float(self.ratio),
            "valid": self.valid,
            "reason": self.reason,
            "marginal": {
                "f": self.f_marginal,
                "g": self.g_marginal,
                "B": self.B_marginal,
                "B1": self.B1_marginal,
            },
        }


def source_constant(p: FhrParams, eps1: float) -> float:
    """C1 = (I^2 + h^2 delta^2 + eps^2 c^2) / (4 eps1 + 2k(a+1)^2) + (-a + eta + gamma)^2 k / 2.

    A vanishing denominator gives a zero quotient when the numerator is zero too
    and +inf otherwise.
    """
    one_plus_a = 1.0 + p.a
    numerator = p.I * p.I + (p.h * p.delta) ** 2 + (p.eps * p.c) ** 2
    denominator = 4.0 * eps1 + 2.0 * p.k * one_plus_a * one_plus_a
    if denominator > 0:
        quotient = numerator / denominator
    else:
        quotient = 0.0 if numerator == 0.0 else math.inf
    tail = -p.a + p.eta + p.gamma
    return quotient + tail * tail * p.k / 2.0


def certificate(p: FhrParams, eps1: float) -> BoundsCertificate:
    """Certificate constants for slack ``eps1``.

    An invalid certificate is returned (not raised) so scans can map infeasible
    regions; ``reason`` says why.

    Raises:
        HypothesisError: k <= 0.
        DomainError: eps1 negative or not finite.
    """
    if not (math.isfinite(eps1) and eps1 >= 0):
        raise DomainError(f"eps1 must be finite and >= 0 (got {eps1!r})")
    m = margins(p)
    one_plus_a = 1.0 + p.a
    shape = _shape_term(p)

    A = one_plus_a * one_plus_a * p.k + 2.0 * eps1
    B = m.f - eps1
    B1 = m.g - eps1
    C = 2.0 * min(B, B1)
    C1 = source_constant(p, eps1)

    B_marginal = _is_marginal(B, p.eta, abs(p.eps - 1.0) / 2.0, shape, eps1)
    B1_marginal = _is_marginal(B1, p.gamma, abs(1.0 - p.delta) / 2.0, shape, eps1)

    reasons = []
    if not m.f > eps1:
        reasons.append(f"f={m.f!r} does not exceed eps1={eps1!r}")
    if not m.g > eps1:
        reasons.append(f"g={m.g!r} does not exceed eps1={eps1!r}")
    if B_marginal or B1_marginal:
        reasons.append("margin within rounding of eps1 (marginal)")
    if math.isinf(C1):
        reasons.append("C1 denominator 4*eps1 + 2k(a+1)^2 vanishes with a nonzero numerator")
    valid = not reasons
    if valid:
        assert B > 0 and B1 > 0 and C > 0
    elif B_marginal or B1_marginal:
        logger.warning("Marginal certificate at a=%r, eps1=%r", p.a, eps1)

    return BoundsCertificate(
        params=p,
        eps1=float(eps1),
        f=m.f,
        g=m.g,
        A=A,
        B=B,
        B1=B1,
        C=C,
        C1=C1,
        valid=valid,
        reason="; ".join(reasons),
        f_marginal=m.f_marginal,
        g_marginal=m.g_marginal,
        B_marginal=B_marginal,
        B1_marginal=B1_marginal,
    )


def energy_envelope(cert: BoundsCertificate, E0: float, t):
    """C1/C (1 - exp(-C t)) + E0 exp(-C t), scalar or elementwise in ``t``."""
    cert.require_valid()
    if not E0 >= 0:
        raise DomainError(f"E0 must be >= 0 (got {E0!r})")
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise DomainError("envelope is defined for t >= 0")
    decay = np.exp(-cert.C * times)
    value = cert.ratio * -np.expm1(-cert.C * times) + E0 * decay
    return float(value) if np.ndim(t) == 0 else value


def energy_bound(cert: BoundsCertificate, E0: float) -> float:
    """Uniform bound E0 + C1/C on the energy."""
    cert.require_valid()
    if not E0 >= 0:
        raise DomainError(f"E0 must be >= 0 (got {E0!r})")
    return E0 + cert.ratio


@dataclass(frozen=True)
class EntryTime:
    tau: float
    already_inside: bool


@dataclass(frozen=True)
class AbsorbingSet:
    """Ball E <= r2 (radius R = sqrt(2 r2)) absorbing every trajectory with E0 <= K0."""

    K0: float
    R: float
    r2: float
    ratio: float
    entry: Optional[EntryTime] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"K0": self.K0, "R": self.R, "r2": self.r2}
        if self.entry is not None:
            out["tau"] = self.entry.tau
            out["already_inside"] = self.entry.already_inside
        return out


def entry_time(cert: BoundsCertificate, E0_max: float, r2: float) -> EntryTime:
    """Time after which the envelope started at ``E0_max`` stays below ``r2``.

    tau = log(|E0 - C1/C| / |r2 - C1/C|) / C; starts with E0_max <= r2 are
    already inside.

    Raises:
        DomainError: E0_max is negative or not finite.
        UnreachableThresholdError: r2 <= C1/C.
    """
    cert.require_valid()
    if not (math.isfinite(E0_max) and E0_max >= 0):
        raise DomainError(f"E0 must be finite and >= 0 (got {E0_max!r})")
    ratio = cert.ratio
    if not r2 > ratio:
        raise UnreachableThresholdError(
            f"threshold r2={r2!r} is not above the asymptotic level C1/C={ratio!r}"
        )
    if E0_max <= r2:
        return EntryTime(tau=0.0, already_inside=True)
    tau = math.log(abs(E0_max - ratio) / abs(r2 - ratio)) / cert.C
    return EntryTime(tau=tau, already_inside=False)


def absorbing_set(cert: BoundsCertificate, K0: float, E0_max: Optional[float] = None) -> AbsorbingSet:
    """R = sqrt(2 (C1/C + K0)), plus the entry time when ``E0_max`` is given."""
    cert.require_valid()
    if not (math.isfinite(K0) and K0 > 0):
        raise DomainError(f"K0 must be finite and > 0 (got {K0!r})")
    r2 = cert.ratio + K0
    entry = entry_time(cert, E0_max, r2) if E0_max is not None else None
    return AbsorbingSet(K0=K0, R=math.sqrt(2.0 * r2), r2=r2, ratio=cert.ratio, entry=entry)


def ratio_curve(p: FhrParams, eps1: np.ndarray) -> np.ndarray:
    """Vectorized C1(eps1)/C(eps1) over admissible slacks."""
    eps1 = np.asarray(eps1, dtype=float)
    m = margins(p)
    one_plus_a = 1.0 + p.a
    numerator = p.I * p.I + (p.h * p.delta) ** 2 + (p.eps * p.c) ** 2
    denominator = 4.0 * eps1 + 2.0 * p.k * one_plus_a * one_plus_a
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = np.where(denominator > 0, numerator / np.where(denominator > 0, denominator, 1.0),
                            0.0 if numerator == 0.0 else np.inf)
        tail = -p.a + p.eta + p.gamma
        C = 2.0 * (min(m.f, m.g) - eps1)
        return (quotient + tail * tail * p.k / 2.0) / C


def optimize_eps1(p: FhrParams, objective_scale: float = 1.0) -> Tuple[float, BoundsCertificate]:
    """Slack minimizing C1/C over [0, min(f, g)(1 - 1e-9)].

    Bounded golden-section/Brent search to 1e-12 in eps1, checked against a
    10^4-point grid; if the grid beats the search by more than 1e-6 relative the
    objective is treated as non-unimodal and the grid winner is refined locally.
    ``objective_scale`` multiplies the objective and never moves the minimizer.

    Raises:
        InfeasibleError: empty admissible interval.
    """
    interval = admissible_eps1(p)
    upper = interval.upper * (1.0 - EPS1_SHRINK)
    if upper < EPS1_XATOL:
        return 0.0, certificate(p, 0.0)

    def objective(e: float) -> float:
        return objective_scale * float(ratio_curve(p, e))

    found = optimize.minimize_scalar(objective, bounds=(0.0, upper), method="bounded",
                                     options={"xatol": EPS1_XATOL})
    best_x, best_val = float(found.x), float(found.fun)
    for edge in (0.0, upper):
        val = objective(edge)
        if val < best_val:
            best_x, best_val = edge, val

    grid = np.linspace(0.0, upper, GRID_POINTS)
    values = objective_scale * ratio_curve(p, grid)
    i = int(np.argmin(values))
    if values[i] < best_val and abs(values[i] - best_val) > 1e-6 * abs(best_val):
        logger.warning("C1/C looks non-unimodal in eps1; refining the grid minimum at %r", grid[i])
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]
        local = optimize.minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                                         options={"xatol": EPS1_XATOL})
        best_x, best_val = (float(local.x), float(local.fun)) if local.fun < values[i] else (float(grid[i]), values[i])

    logger.debug("optimize_eps1: eps1*=%r, C1/C=%r", best_x, best_val / objective_scale)
    return best_x, certificate(p, best_x)
