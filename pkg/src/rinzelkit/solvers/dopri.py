"""Dormand-Prince 5(4) stepper with FSAL and a quartic continuous extension."""

from typing import Callable, Tuple, Union

import numpy as np

ORDER = 5
ERROR_ORDER = 4
N_STAGES = 6

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Fifth-order weights minus the embedded fourth-order ones, FSAL stage included.
E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Coefficients of theta, theta^2, theta^3, theta^4 in the continuous extension.
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class DopriSegment:
    """Quartic interpolant over one accepted Dormand-Prince step."""

    __slots__ = ("t_old", "t_new", "y_old", "y_new", "Q")

    def __init__(self, t_old: float, t_new: float, y_old: np.ndarray, y_new: np.ndarray, K: np.ndarray):
        self.t_old = t_old
        self.t_new = t_new
        self.y_old = y_old
        self.y_new = y_new
        self.Q = K.T @ P

    def __call__(self, t: Union[float, np.ndarray]) -> np.ndarray:
        h = self.t_new - self.t_old
        theta = (np.asarray(t, dtype=float) - self.t_old) / h
        powers = np.cumprod(np.repeat(np.atleast_1d(theta)[None, :], 4, axis=0), axis=0)
        values = self.y_old[:, None] + h * (self.Q @ powers)
        if np.ndim(t) == 0:
            return values[:, 0]
        return values.T


def dopri_step(
    f: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    y: np.ndarray,
    h: float,
    f0: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One trial step of size ``h`` from (t, y) with f(t, y) = ``f0`` supplied.

    Returns:
        (y_new, f_new, err, K): the fifth-order solution, the derivative at the
        new point (reused as the next ``f0``), the local error estimate and the
        7-row stage matrix needed for dense output.
    """
    K = np.empty((N_STAGES + 1, y.shape[0]))
    K[0] = f0
    for s in range(1, N_STAGES):
        dy = h * (K[:s].T @ A[s, :s])
        K[s] = f(t + C[s] * h, y + dy)
    y_new = y + h * (K[:N_STAGES].T @ B)
    f_new = f(t + h, y_new)
    K[N_STAGES] = f_new
    err = h * (K.T @ E)
    return y_new, f_new, err, K
