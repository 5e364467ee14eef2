"""Initial-value integrators, dense output and trajectory records."""

from rinzelkit.solvers.integrator import (
    Direction,
    Event,
    EventOutcome,
    EventRecord,
    IntegrationResult,
    IntegratorConfig,
    Method,
    integrate,
    integrate_to_event,
    simulate,
)
from rinzelkit.solvers.trajectory import IntegrationStats, Trajectory

__all__ = [
    "Direction",
    "Event",
    "EventOutcome",
    "EventRecord",
    "IntegrationResult",
    "IntegrationStats",
    "IntegratorConfig",
    "Method",
    "Trajectory",
    "integrate",
    "integrate_to_event",
    "simulate",
]
