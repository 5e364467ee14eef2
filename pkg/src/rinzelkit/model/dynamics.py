"""Right-hand sides, Jacobian and energy of the FHR system.

Two cubic conventions appear in the literature for this model:

* the ODE form ``u^2 (a + 1 - u/k)`` used by ``rhs_general`` (and by the
  boundedness analysis), and
* the reaction-diffusion form ``k u^2 (a + 1 - u)`` used by
  ``rinzelkit.pde.mol``.

They coincide only for k = 1. With a = -1, k = 3 the ODE form is the classic
``u - u^3/3`` system.
"""

import logging
import math
from typing import Callable, Tuple

import numpy as np

from rinzelkit.errors import DomainError, PreconditionError
from rinzelkit.model.params import FhrParams, State

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]
MatrixField = Callable[[float, np.ndarray], np.ndarray]

DEFAULT_CONSTRAINT_TOL = 1e-12


def _general(p: FhrParams, u, w, y):
    du = -p.a * u + u * u * (p.a + 1.0 - u / p.k) - w + y + p.I
    dw = p.eps * (-p.beta * w + p.c + u)
    dy = p.delta * (-u + p.h - p.d * y)
    return du, dw, dy


def _classic(p: FhrParams, u, w, y):
    du = u - u * u * u / 3.0 + p.I - w + y
    dw = p.eps * (-p.beta * w + p.c + u)
    dy = p.delta * (-u + p.h - p.d * y)
    return du, dw, dy


def rhs_general(p: FhrParams, s: State) -> State:
    """Vector field of the generalized system (cubic ``u^2 (a + 1 - u/k)``)."""
    return State(*_general(p, s.u, s.w, s.y))


def rhs_classic(p: FhrParams, s: State) -> State:
    """Vector field of the classic system ``u - u^3/3 + I - w + y``; ``a`` and ``k`` are ignored."""
    return State(*_classic(p, s.u, s.w, s.y))


def jacobian(p: FhrParams, s: State) -> np.ndarray:
    """Analytic Jacobian of ``rhs_general`` at ``s``."""
    return _jacobian_matrix(p, s.u)


def _jacobian_matrix(p: FhrParams, u: float) -> np.ndarray:
    return np.array([
        [-p.a + 2.0 * u * (p.a + 1.0) - 3.0 * u * u / p.k, -1.0, 1.0],
        [p.eps, -p.eps * p.beta, 0.0],
        [-p.delta, 0.0, -p.delta * p.d],
    ])


def energy(s: State) -> float:
    """E = (u^2 + w^2 + y^2) / 2."""
    return 0.5 * (s.u * s.u + s.w * s.w + s.y * s.y)


def energy_rate(p: FhrParams, s: State) -> float:
    """dE/dt along the generalized system, by the chain rule (no differencing)."""
    du, dw, dy = _general(p, s.u, s.w, s.y)
    return s.u * du + s.w * dw + s.y * dy


def energy_of(values: np.ndarray) -> np.ndarray:
    """Energy of stacked states, shape (..., 3) -> (...)."""
    values = np.asarray(values, dtype=float)
    return 0.5 * np.sum(values * values, axis=-1)


def energy_rate_of(p: FhrParams, values: np.ndarray) -> np.ndarray:
    """Vectorized ``energy_rate`` over stacked states of shape (..., 3)."""
    values = np.asarray(values, dtype=float)
    u, w, y = values[..., 0], values[..., 1], values[..., 2]
    du, dw, dy = _general(p, u, w, y)
    return u * du + w * dw + y * dy


def vector_field(p: FhrParams, form: str = "general") -> VectorField:
    """Integrator-facing ``f(t, x)`` on length-3 arrays.

    Args:
        p: Parameter set.
        form: ``"general"`` or ``"classic"``.
    """
    impl = {"general": _general, "classic": _classic}.get(form)
    if impl is None:
        raise DomainError(f"Unknown system form {form!r} (expected 'general' or 'classic')")

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return np.array(impl(p, x[0], x[1], x[2]))

    return f


def jacobian_field(p: FhrParams, form: str = "general") -> MatrixField:
    """Integrator-facing ``J(t, x)`` matching ``vector_field(p, form)``."""
    if form == "classic":
        p = FhrParams(**dict(p.to_dict(), a=-1.0, k=3.0))
    elif form != "general":
        raise DomainError(f"Unknown system form {form!r} (expected 'general' or 'classic')")

    def jac(t: float, x: np.ndarray) -> np.ndarray:
        return _jacobian_matrix(p, x[0])

    return jac


def reduced_rhs(p: FhrParams, Q1: float, Q2: float, t: float, u: float) -> float:
    """Scalar field of the first-integral reduction: u - u^3/3 + Q1 + Q2 exp(-beta eps t)."""
    return u - u * u * u / 3.0 + Q1 + Q2 * math.exp(-p.eta * t)


def reduced_field(p: FhrParams, Q1: float, Q2: float) -> VectorField:
    """``reduced_rhs`` wrapped for the integrator (state of length 1)."""
    rate = p.eta

    def f(t: float, x: np.ndarray) -> np.ndarray:
        u = x[0]
        return np.array([u - u * u * u / 3.0 + Q1 + Q2 * math.exp(-rate * t)])

    return f


def reduced_jacobian(p: FhrParams) -> MatrixField:
    def jac(t: float, x: np.ndarray) -> np.ndarray:
        return np.array([[1.0 - x[0] * x[0]]])

    return jac


def reduced_bound(p: FhrParams, Q1: float, Q2: float, u0: float, t_final: float) -> float:
    """Bound on |u| for the reduced equation on [0, t_final].

    With |Q1 + Q2 exp(-beta eps t)| <= q on the window, u' has the sign of -u
    wherever |u| > R, R the largest root of R^3/3 - R = q, so |u| never
    exceeds max(|u0|, R).
    """
    q = abs(Q1) + abs(Q2) * max(1.0, math.exp(-p.eta * t_final))
    roots = np.roots([1.0 / 3.0, 0.0, -1.0, -q])
    radius = float(np.max(roots[np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))].real))
    return max(abs(u0), radius)


def _close(x: float, y: float, rel_tol: float) -> bool:
    return abs(x - y) <= rel_tol * max(abs(x), abs(y))


def first_integral_offsets(
    p: FhrParams,
    s0: State,
    rel_tol: float = DEFAULT_CONSTRAINT_TOL,
) -> Tuple[float, float]:
    """Offsets (Q1, Q2) of the first integral of the classic system.

    Under beta*eps = delta*d and eps = -delta, q(t) = I - w(t) + y(t) obeys
    q' = -beta*eps (q - Q1) with Q1 = I - (c + h)/beta, so
    u' = u - u^3/3 + Q1 + Q2 exp(-beta eps t) with Q2 = q(0) - Q1.

    Raises:
        PreconditionError: a constraint fails (the message names it) or beta = 0.
    """
    if not _close(p.eta, p.gamma, rel_tol):
        raise PreconditionError(
            f"first integral requires beta*eps == delta*d (got {p.eta!r} vs {p.gamma!r})"
        )
    if not _close(p.eps, -p.delta, rel_tol):
        raise PreconditionError(
            f"first integral requires eps == -delta (got eps={p.eps!r}, delta={p.delta!r})"
        )
    if p.beta == 0.0:
        raise PreconditionError("first integral requires beta != 0")

    q1 = p.I - (p.c + p.h) / p.beta
    q2 = (p.I - s0.w + s0.y) - q1
    logger.debug("First-integral offsets Q1=%r Q2=%r", q1, q2)
    return q1, q2
