"""FHR parameter set, state and vector fields."""

from rinzelkit.model.dynamics import (
    energy,
    energy_rate,
    first_integral_offsets,
    jacobian,
    reduced_rhs,
    rhs_classic,
    rhs_general,
)
from rinzelkit.model.params import FhrParams, State, time_scales

__all__ = [
    "FhrParams",
    "State",
    "time_scales",
    "rhs_general",
    "rhs_classic",
    "jacobian",
    "energy",
    "energy_rate",
    "reduced_rhs",
    "first_integral_offsets",
]
