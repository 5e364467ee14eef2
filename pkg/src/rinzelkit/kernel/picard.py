"""Picard iteration of the integral representation on a truncated line.

u(x, t) = (H * u0)(x, t) + int_0^t (H(., t - tau) * F[., tau, u(., tau)])(x) dtau

Space convolutions use hat-smoothed kernel tables and FFTs; the time integral
uses the trapezoid rule on the uniform t grid. Outside [-L, L] the data are
extended by zero, so only nodes at distance sqrt(4 D T ln(1/tol)) from the ends
are trusted.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import fft

from rinzelkit.errors import ContractionError, DomainError, DomainSizeError
from rinzelkit.kernel.source import Profile, SourceContext, evaluate_profile, source_F
from rinzelkit.kernel.tables import DEFAULT_ORDER, build_tables
from rinzelkit.pde.fields import PdeSolution

logger = logging.getLogger(__name__)

GROWTH_LIMIT = 3

SourceFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class PicardGrid:
    """Uniform space-time grid: nx nodes on [-L, L], nt steps on [0, T]."""

    L: float
    nx: int
    nt: int
    T: float

    def __post_init__(self):
        if not (self.L > 0 and self.T > 0 and self.nx >= 3 and self.nt >= 1):
            raise DomainError(f"invalid Picard grid (L={self.L}, nx={self.nx}, nt={self.nt}, T={self.T})")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.nx)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.nx - 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.nt + 1)

    @property
    def dt(self) -> float:
        return self.T / self.nt


def trusted_half_width(L: float, D: float, T: float, tol: float) -> float:
    """Half-width of the region unaffected (to ``tol``) by truncating the line at +-L."""
    return L - math.sqrt(4.0 * D * T * math.log(1.0 / tol))


def reconstruct_slow_fields(u: np.ndarray, t: np.ndarray, ctx: SourceContext, x: np.ndarray):
    """w and y from u by variation of constants, trapezoid rule in time, pointwise in x.

    w' = eps(-beta w + c + u) and y' = delta(-u + h - d y) are linear in (w, y)
    for given u.
    """
    p = ctx.params
    w = np.empty_like(u)
    y = np.empty_like(u)
    w[0] = evaluate_profile(ctx.w0, x)
    y[0] = evaluate_profile(ctx.y0, x)
    for n in range(1, len(t)):
        dt = t[n] - t[n - 1]
        ew, ey = math.exp(-p.eta * dt), math.exp(-p.gamma * dt)
        w[n] = ew * w[n - 1] + (p.c / p.beta) * -math.expm1(-p.eta * dt) + 0.5 * p.eps * dt * (ew * u[n - 1] + u[n])
        y[n] = ey * y[n - 1] + (p.h / p.d) * -math.expm1(-p.gamma * dt) - 0.5 * p.delta * dt * (ey * u[n - 1] + u[n])
    return w, y


def picard_solve(
    u0: Profile,
    ctx: SourceContext,
    grid: PicardGrid,
    tol: float = 1e-10,
    max_sweeps: int = 50,
    quadrature_order: int = DEFAULT_ORDER,
    jobs: Optional[int] = 1,
    source: Optional[SourceFn] = None,
    reconstruct: bool = True,
) -> PdeSolution:
    """Fixed-point sweeps u <- H*u0 + H**F(u), started from H*u0.

    Args:
        u0: Initial profile (constant, callable or samples on ``grid.x``).
        ctx: Parameters (k = 1) and the initial w, y fields.
        grid: Space-time grid.
        tol: Stop once the sup-norm update of a sweep is at most ``tol``; also the
            truncation tolerance for the domain checks.
        max_sweeps: Sweep cap; hitting it returns the last iterate with
            ``meta["converged"] = False``.
        quadrature_order: Gauss-Legendre order of the kernel tables.
        jobs: Worker processes for the kernel tables.
        source: Replacement for ``source_F`` as f(u, x, t).
        reconstruct: Also return w and y.

    Raises:
        DomainSizeError: u0 is not below ``tol`` at +-L, or L is too small for T.
        ContractionError: the update grew on three consecutive sweeps.
    """
    p = ctx.params
    if not p.D > 0:
        raise DomainError(f"Picard route needs D > 0 (got D={p.D})")
    x, t, dt = grid.x, grid.t, grid.dt
    u_init = evaluate_profile(u0, x)
    edge = max(abs(u_init[0]), abs(u_init[-1]))
    if edge > tol:
        raise DomainSizeError(f"u0 is {edge:.3e} at the domain ends, above tol={tol:.1e}; enlarge L")
    if math.exp(-grid.L**2 / (4.0 * p.D * grid.T)) > tol:
        raise DomainSizeError(f"heat-kernel tail mass at L={grid.L} exceeds tol={tol:.1e} for T={grid.T}")
    half_width = trusted_half_width(grid.L, p.D, grid.T, tol)
    if half_width <= 0:
        raise DomainSizeError(f"L={grid.L} leaves no trusted interior for T={grid.T}, tol={tol:.1e}")

    source = source or (lambda u, xs, tau: source_F(u, xs, tau, ctx))
    tables = build_tables(p, grid.dx, grid.nx, t, quadrature_order, jobs)
    nx = grid.nx
    nfft = fft.next_fast_len(3 * nx - 2, real=True)
    K_hat = fft.rfft(tables.K, n=nfft, axis=1)

    def back(spectrum: np.ndarray) -> np.ndarray:
        return fft.irfft(spectrum, n=nfft, axis=-1)[..., nx - 1: 2 * nx - 1]

    linear = back(K_hat * fft.rfft(u_init, n=nfft)[None, :])
    linear[0] = u_init
    u = linear.copy()

    residuals = []
    growth = 0
    converged = False
    for sweep in range(1, max_sweeps + 1):
        F = np.array([source(u[j], x, t[j]) for j in range(len(t))])
        F_hat = fft.rfft(F, n=nfft, axis=1)
        u_new = linear.copy()
        for n in range(1, len(t)):
            weights = np.full(n + 1, dt)
            weights[0] = weights[-1] = 0.5 * dt
            acc = np.einsum("j,jk->k", weights, K_hat[n::-1] * F_hat[: n + 1])
            u_new[n] += back(acc)
        residual = float(np.max(np.abs(u_new - u)))
        if not math.isfinite(residual):
            raise ContractionError(f"Picard sweep {sweep} produced non-finite values; reduce T", residuals)
        growth = growth + 1 if residuals and residual > residuals[-1] else 0
        residuals.append(residual)
        u = u_new
        logger.debug("Picard sweep %d: update %.3e", sweep, residual)
        if growth >= GROWTH_LIMIT:
            logger.warning("Picard updates grew on %d consecutive sweeps", growth)
            raise ContractionError(
                f"Picard sweeps are not contracting (updates {residuals[-4:]}); use a smaller T", residuals
            )
        if residual <= tol:
            converged = True
            break

    if not converged:
        logger.warning("Picard iteration stopped after %d sweeps at update %.3e", max_sweeps, residuals[-1])
    solution = PdeSolution(x=x, t=t, u=u, residuals=residuals, method="picard")
    if reconstruct:
        solution.w, solution.y = reconstruct_slow_fields(u, t, ctx, x)
    solution.meta.update(
        converged=converged,
        sweeps=len(residuals),
        trusted_half_width=half_width,
        contraction_ratio=solution.contraction_ratio,
        dx=grid.dx,
        dt=dt,
    )
    logger.info(
        "Picard finished in %d sweeps (update %.3e, ratio %s)",
        len(residuals), residuals[-1], solution.contraction_ratio,
    )
    return solution
