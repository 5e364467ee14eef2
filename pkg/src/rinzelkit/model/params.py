"""FHR parameter set and phase-space state."""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Sequence

import numpy as np

from rinzelkit.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

PARAM_KEYS = ("D", "a", "I", "eps", "beta", "c", "d", "h", "delta", "k")

# Worked example from the boundedness analysis; `a` is left to the caller.
PAPER_CONSTANTS = {
    "I": 0.3125,
    "eps": 0.8,
    "c": 0.2,
    "h": -0.775,
    "beta": 0.126,
    "delta": 0.5,
    "d": 1.0,
    "k": 3.0,
}


def _require_finite(owner: str, values: Mapping[str, float]) -> None:
    bad = [name for name, value in values.items() if not math.isfinite(value)]
    if bad:
        raise DomainError(f"{owner}: non-finite value for {', '.join(bad)}")


@dataclass(frozen=True)
class FhrParams:
    """Constants of the FitzHugh-Rinzel system.

    ``eta`` and ``gamma`` are derived on access and never stored.
    """

    D: float
    a: float
    I: float  # noqa: E741
    eps: float
    beta: float
    c: float
    d: float
    h: float
    delta: float
    k: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        _require_finite("FhrParams", asdict(self))

    @property
    def eta(self) -> float:
        return self.beta * self.eps

    @property
    def gamma(self) -> float:
        return self.delta * self.d

    @classmethod
    def paper_set(cls, a: float, D: float = 1.0, **overrides: float) -> "FhrParams":
        """Worked-example constants with the given threshold ``a``."""
        values = dict(PAPER_CONSTANTS, a=a, D=D)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "FhrParams":
        """Build from a key-value mapping, rejecting unknown and missing keys.

        ``D`` is optional (defaults to 1.0) because the pure ODE path never uses it.

        Raises:
            ConfigError: unknown keys (typos such as ``epsilon``), missing keys or
                non-numeric values.
        """
        unknown = sorted(set(data) - set(PARAM_KEYS))
        if unknown:
            raise ConfigError(
                f"Unknown parameter keys: {', '.join(unknown)} (allowed: {', '.join(PARAM_KEYS)})"
            )
        values = {"D": 1.0}
        values.update(data)
        missing = [key for key in PARAM_KEYS if key not in values]
        if missing:
            raise ConfigError(f"Missing required parameter keys: {', '.join(missing)}")
        try:
            return cls(**{key: float(values[key]) for key in PARAM_KEYS})
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise ConfigError(f"Parameter values must be numbers: {exc}") from exc

    def to_dict(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in PARAM_KEYS}


@dataclass(frozen=True)
class State:
    """Phase point (u, w, y): membrane potential, recovery variable, slow current."""

    u: float
    w: float
    y: float

    def __post_init__(self):
        for name in ("u", "w", "y"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require_finite("State", {"u": self.u, "w": self.w, "y": self.y})

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "State":
        arr = np.asarray(values, dtype=float)
        if arr.shape != (3,):
            raise DomainError(f"State needs exactly 3 components, got shape {arr.shape}")
        return cls(*arr)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "State":
        unknown = sorted(set(data) - {"u", "w", "y"})
        if unknown:
            raise ConfigError(f"Unknown state keys: {', '.join(unknown)}")
        missing = [key for key in ("u", "w", "y") if key not in data]
        if missing:
            raise ConfigError(f"Missing state keys: {', '.join(missing)}")
        return cls(data["u"], data["w"], data["y"])

    def to_array(self) -> np.ndarray:
        return np.array([self.u, self.w, self.y])

    def norm(self) -> float:
        return math.sqrt(self.u * self.u + self.w * self.w + self.y * self.y)


def time_scales(p: FhrParams) -> Dict[str, float]:
    """Rates of the three variables and the damping rates of w and y.

    u evolves at unit rate, w at ``eps`` and y at ``delta``; the system reads as
    two fast (u, w) and one slow (y) variable when delta << eps.
    """
    return {
        "u": 1.0,
        "w": p.eps,
        "y": p.delta,
        "eta": p.eta,
        "gamma": p.gamma,
    }
