"""Tests for the method-of-lines solver."""

import math

import numpy as np
import pytest

from rinzelkit.errors import DomainError
from rinzelkit.model.params import FhrParams, State
from rinzelkit.pde.grid import Boundary, SpatialGrid
from rinzelkit.pde.mol import pde_jacobian, semidiscretize, solve_pde
from rinzelkit.solvers.integrator import IntegratorConfig, Method, simulate

TIGHT = IntegratorConfig(method=Method.ROSENBROCK, abs_tol=1e-10, rel_tol=1e-10)


def params(**values):
    base = dict(D=1.0, a=-0.98, I=0.3125, eps=0.8, beta=0.126, c=0.2, d=1.0, h=-0.775, delta=0.5, k=1.0)
    base.update(values)
    return FhrParams(**base)


def manufactured_error(n, boundary):
    """Sup error at T = 1 for u* = e^{-t} cos(pi x) on [-1, 1], eps = delta = 0, no reaction."""
    p = params(a=0.0, I=0.0, eps=0.0, delta=0.0, k=0.0)
    grid = SpatialGrid(1.0, n, boundary)

    def forcing(x, t):
        return (math.pi**2 - 1.0) * math.exp(-t) * np.cos(math.pi * x)

    solution = solve_pde(p, grid, lambda x: np.cos(math.pi * x), 0.0, 0.0, 1.0, TIGHT, t_eval=[1.0],
                         forcing=forcing)
    return float(np.max(np.abs(solution.u[-1] - math.exp(-1.0) * np.cos(math.pi * grid.x))))


class TestSemidiscretization:
    def test_jacobian_matches_finite_differences(self, rng):
        p = params(k=3.0)
        grid = SpatialGrid(1.0, 5)
        f, jac = semidiscretize(p, grid), pde_jacobian(p, grid)
        Y = rng.uniform(-1.0, 1.0, 15)
        step = 1e-6
        columns = []
        for j in range(15):
            e = np.zeros(15)
            e[j] = step
            columns.append((f(0.0, Y + e) - f(0.0, Y - e)) / (2 * step))
        np.testing.assert_allclose(jac(0.0, Y).toarray(), np.column_stack(columns), atol=1e-6)

    def test_negative_diffusion(self):
        with pytest.raises(DomainError, match="D="):
            semidiscretize(params(D=-1.0), SpatialGrid(1.0, 5))


class TestSolvePde:
    def test_zero_data_stays_zero(self):
        p = params(I=0.0, c=0.0, h=0.0)
        solution = solve_pde(p, SpatialGrid(5.0, 21), 0.0, 0.0, 0.0, 2.0)
        assert np.max(np.abs(solution.u)) == 0.0
        assert np.max(np.abs(solution.w)) == 0.0

    @pytest.mark.parametrize("boundary", [Boundary.ZERO_FLUX, Boundary.PERIODIC])
    def test_uniform_data_follows_the_ode(self, boundary):
        p = params()
        solution = solve_pde(p, SpatialGrid(3.0, 11, boundary), 0.2, -0.1, 0.3, 5.0, TIGHT, t_eval=[0.0, 2.5, 5.0])
        reference = simulate(p, State(0.2, -0.1, 0.3), 5.0, IntegratorConfig(abs_tol=1e-11, rel_tol=1e-11))
        expected = reference.trajectory([0.0, 2.5, 5.0])
        for field, column in (("u", 0), ("w", 1), ("y", 2)):
            values = getattr(solution, field)
            assert np.ptp(values, axis=1) == pytest.approx(np.zeros(3), abs=1e-9)
            assert values[:, 0] == pytest.approx(expected[:, column], abs=1e-6)

    def test_no_diffusion_decouples_nodes(self):
        p = params(D=0.0)
        profile = np.linspace(-0.5, 0.5, 7)
        solution = solve_pde(p, SpatialGrid(1.0, 7), profile, 0.0, 0.0, 3.0, TIGHT, t_eval=[3.0])
        cfg = IntegratorConfig(abs_tol=1e-11, rel_tol=1e-11)
        for i, u0 in enumerate(profile):
            expected = simulate(p, State(u0, 0.0, 0.0), 3.0, cfg).trajectory.y_final[0]
            assert solution.u[-1, i] == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("boundary", [Boundary.ZERO_FLUX, Boundary.PERIODIC])
    def test_second_order_in_space(self, boundary):
        errors = [manufactured_error(n, boundary) for n in (21, 41, 81)]
        assert math.log2(errors[0] / errors[1]) == pytest.approx(2.0, abs=0.2)
        assert math.log2(errors[1] / errors[2]) == pytest.approx(2.0, abs=0.2)

    def test_metadata(self):
        solution = solve_pde(params(), SpatialGrid(2.0, 9), 0.0, 0.0, 0.0, 0.5)
        assert len(solution.t) == 101
        assert solution.method == "mol"
        assert solution.meta["boundary"] == "zero_flux"
        assert solution.meta["integrator"]["method"] == "rosenbrock"

    @pytest.mark.parametrize("T", [0.0, -1.0, math.inf])
    def test_bad_horizon(self, T):
        with pytest.raises(DomainError, match="horizon"):
            solve_pde(params(), SpatialGrid(1.0, 5), 0.0, 0.0, 0.0, T)

    def test_sample_times_inside_horizon(self):
        with pytest.raises(DomainError, match="sample times"):
            solve_pde(params(), SpatialGrid(1.0, 5), 0.0, 0.0, 0.0, 1.0, t_eval=[0.5, 2.0])
