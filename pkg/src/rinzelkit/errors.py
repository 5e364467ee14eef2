"""Exception hierarchy for rinzelkit.

Everything derived from ``ValueError`` is a problem with what was asked
(config, domain, hypotheses); everything derived from ``RuntimeError`` is a
numerical failure while answering it. The CLI maps the two families to exit
codes 2 and 3.
"""

from typing import List, Optional

import numpy as np


class RinzelError(Exception):
    """Base class for all rinzelkit errors."""


class ConfigError(RinzelError, ValueError):
    """Malformed run configuration (unknown, missing or mistyped keys)."""


class DomainError(RinzelError, ValueError):
    """Input outside the domain of an operation (non-finite values, bad ranges)."""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message)
        self.t = t

    def __reduce__(self):
        return self.__class__, (str(self), self.t)


class HypothesisError(DomainError):
    """A theorem hypothesis does not hold (e.g. k <= 0)."""


class PreconditionError(DomainError):
    """An operation precondition does not hold."""


class DomainSizeError(DomainError):
    """Truncated spatial domain is too small for the requested tolerance."""


class InfeasibleError(RinzelError, ValueError):
    """No admissible slack: the certificate conditions cannot be met."""


class InvalidCertificateError(RinzelError, ValueError):
    """A certificate with validity=False was used where a valid one is required."""


class UnreachableThresholdError(RinzelError, ValueError):
    """The energy envelope never reaches the requested threshold."""


class NumericalError(RinzelError, RuntimeError):
    """Numerical failure while computing an answer."""


class StepSizeUnderflowError(NumericalError):
    """Adaptive step fell below h_min (stiffness or finite-time blow-up)."""

    def __init__(self, message: str, t: float, y: np.ndarray):
        super().__init__(message)
        self.t = t
        self.y = y

    def __reduce__(self):
        return self.__class__, (str(self), self.t, self.y)


class MaxStepsExceededError(NumericalError):
    """Integrator hit its max_steps cap before reaching the final time."""

    def __init__(self, message: str, t: float, y: np.ndarray, n_steps: int):
        super().__init__(message)
        self.t = t
        self.y = y
        self.n_steps = n_steps

    def __reduce__(self):
        return self.__class__, (str(self), self.t, self.y, self.n_steps)


class AccuracyError(NumericalError):
    """Quadrature did not reach the requested tolerance within its budget."""

    def __init__(self, message: str, value: float, error: float, tol: float):
        super().__init__(message)
        self.value = value
        self.error = error
        self.tol = tol

    def __reduce__(self):
        return self.__class__, (str(self), self.value, self.error, self.tol)


class ContractionError(NumericalError):
    """Picard sweeps are not contracting."""

    def __init__(self, message: str, residuals: List[float]):
        super().__init__(message)
        self.residuals = list(residuals)

    def __reduce__(self):
        return self.__class__, (str(self), self.residuals)
