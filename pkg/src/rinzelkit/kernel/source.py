"""Nonlinear source of the integral representation (w and y folded into memory terms)."""

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from rinzelkit.errors import DomainError
from rinzelkit.model.params import FhrParams

Profile = Union[float, Callable[[np.ndarray], np.ndarray]]


def evaluate_profile(profile: Profile, x) -> np.ndarray:
    """Sample a constant, callable or array profile at ``x``."""
    x = np.asarray(x, dtype=float)
    if callable(profile):
        return np.broadcast_to(np.asarray(profile(x), dtype=float), x.shape).copy()
    values = np.asarray(profile, dtype=float)
    if values.ndim == 0:
        return np.full(x.shape, float(values))
    if values.shape != x.shape:
        raise DomainError(f"sampled profile has shape {values.shape}, grid has {x.shape}")
    return values.copy()


@dataclass(frozen=True)
class SourceContext:
    """Parameters plus the initial recovery and slow-current fields.

    The integral representation holds for k = 1 only; other values are
    rejected rather than rescaled.
    """

    params: FhrParams
    w0: Profile = 0.0
    y0: Profile = 0.0

    def __post_init__(self):
        p = self.params
        if p.k != 1.0:
            raise DomainError(f"the integral representation requires k = 1 (got k={p.k})")
        if p.beta == 0.0 or p.d == 0.0:
            raise DomainError("source offsets divide by beta and d; both must be nonzero")


def source_F(u, x, t, ctx: SourceContext):
    """F = u^2(a+1-u) + I - w0 e^{-eta t} + y0 e^{-gamma t} - (c/beta)(1 - e^{-eta t}) + (h/d)(1 - e^{-gamma t})."""
    p = ctx.params
    u = np.asarray(u, dtype=float)
    w0 = evaluate_profile(ctx.w0, x)
    y0 = evaluate_profile(ctx.y0, x)
    decay_w = math.exp(-p.eta * t)
    decay_y = math.exp(-p.gamma * t)
    value = (
        u * u * (p.a + 1.0 - u)
        + p.I
        - w0 * decay_w
        + y0 * decay_y
        - (p.c / p.beta) * -math.expm1(-p.eta * t)
        + (p.h / p.d) * -math.expm1(-p.gamma * t)
    )
    return float(value) if np.ndim(value) == 0 else value
