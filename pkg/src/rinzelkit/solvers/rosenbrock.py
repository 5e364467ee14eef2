"""Linearly implicit Rosenbrock stepper of order 2(3), L-stable.

This is the modified Rosenbrock triple of Shampine and Reichelt (the MATLAB
``ode23s`` scheme). Each step factors W = I - h d J once and reuses the
factorization for three solves.
"""

import math
from typing import Callable, Tuple, Union

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

ORDER = 2
ERROR_ORDER = 2

D = 1.0 / (2.0 + math.sqrt(2.0))
E32 = 6.0 + math.sqrt(2.0)


class LinearSolver:
    """Factorization of W = I - h d J for dense or scipy.sparse Jacobians."""

    def __init__(self, J, h: float):
        n = J.shape[0]
        if sparse.issparse(J):
            W = sparse.identity(n, format="csc") - (h * D) * sparse.csc_matrix(J)
            self._solve = sparse_linalg.splu(W.tocsc()).solve
        else:
            lu = linalg.lu_factor(np.eye(n) - (h * D) * np.asarray(J), check_finite=False)
            self._solve = lambda b: linalg.lu_solve(lu, b, check_finite=False)

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._solve(b)


class RosenbrockSegment:
    """Quadratic interpolant y + h (theta(1-theta) k1 + theta(theta-2d) k2) / (1-2d)."""

    __slots__ = ("t_old", "t_new", "y_old", "y_new", "k1", "k2")

    def __init__(self, t_old: float, t_new: float, y_old: np.ndarray, y_new: np.ndarray, k1, k2):
        self.t_old = t_old
        self.t_new = t_new
        self.y_old = y_old
        self.y_new = y_new
        self.k1 = k1
        self.k2 = k2

    def __call__(self, t: Union[float, np.ndarray]) -> np.ndarray:
        h = self.t_new - self.t_old
        theta = np.atleast_1d((np.asarray(t, dtype=float) - self.t_old) / h)
        scale = 1.0 - 2.0 * D
        c1 = theta * (1.0 - theta) / scale
        c2 = theta * (theta - 2.0 * D) / scale
        values = self.y_old[None, :] + h * (c1[:, None] * self.k1[None, :] + c2[:, None] * self.k2[None, :])
        if np.ndim(t) == 0:
            return values[0]
        return values


def time_derivative(f: Callable, t: float, y: np.ndarray, f0: np.ndarray) -> np.ndarray:
    """Forward-difference estimate of df/dt at fixed y."""
    dt = math.sqrt(np.finfo(float).eps) * max(1.0, abs(t))
    return (f(t + dt, y) - f0) / dt


def rosenbrock_step(
    f: Callable[[float, np.ndarray], np.ndarray],
    J,
    t: float,
    y: np.ndarray,
    h: float,
    f0: np.ndarray,
    T: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """One trial step of size ``h``.

    Args:
        f: Right-hand side.
        J: Jacobian at (t, y), dense array or scipy.sparse matrix.
        t, y: Current point.
        h: Step size.
        f0: f(t, y).
        T: df/dt at (t, y); zeros for autonomous systems.

    Returns:
        (y_new, f_new, err, (k1, k2)).
    """
    solver = LinearSolver(J, h)
    hdT = (h * D) * T
    k1 = solver.solve(f0 + hdT)
    f1 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k2 = solver.solve(f1 - k1) + k1
    y_new = y + h * k2
    f_new = f(t + h, y_new)
    k3 = solver.solve(f_new - E32 * (k2 - f1) - 2.0 * (k1 - f0) + hdT)
    err = (h / 6.0) * (k1 - 2.0 * k2 + k3)
    return y_new, f_new, err, (k1, k2)
