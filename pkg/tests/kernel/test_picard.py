"""Tests for the Picard solver of the integral equation."""

import logging
import math

import numpy as np
import pytest

from rinzelkit.errors import ContractionError, DomainError, DomainSizeError
from rinzelkit.kernel.picard import PicardGrid, picard_solve, reconstruct_slow_fields, trusted_half_width
from rinzelkit.kernel.source import SourceContext, evaluate_profile, source_F
from rinzelkit.model.params import FhrParams

GRID = PicardGrid(L=10.0, nx=401, nt=50, T=0.25)


def params(**values):
    base = dict(D=1.0, a=0.5, I=0.0, eps=0.0, beta=0.5, c=0.0, d=1.0, h=0.0, delta=0.0, k=1.0)
    base.update(values)
    return FhrParams(**base)


def gaussian(x):
    return 0.5 * np.exp(-x * x)


def no_source(u, x, t):
    return np.zeros_like(x)


class TestPicardGrid:
    def test_spacing(self):
        assert GRID.dx == pytest.approx(0.05)
        assert GRID.dt == pytest.approx(0.005)
        assert len(GRID.t) == 51
        assert GRID.x[0] == -10.0 and GRID.x[-1] == 10.0

    @pytest.mark.parametrize("values", [(0.0, 401, 50, 0.25), (10.0, 2, 50, 0.25), (10.0, 401, 0, 0.25)])
    def test_invalid(self, values):
        with pytest.raises(DomainError, match="invalid Picard grid"):
            PicardGrid(*values)

    def test_trusted_half_width(self):
        assert trusted_half_width(10.0, 1.0, 0.25, 1e-10) == pytest.approx(10.0 - math.sqrt(math.log(1e10)))


class TestSource:
    def test_requires_unit_k(self):
        with pytest.raises(DomainError, match="k = 1"):
            SourceContext(params(k=3.0))

    def test_requires_nonzero_denominators(self):
        with pytest.raises(DomainError, match="beta and d"):
            SourceContext(params(beta=0.0))

    def test_initial_value(self):
        ctx = SourceContext(params(I=0.3, c=0.2, h=-0.1), w0=0.4, y0=0.1)
        x = np.zeros(3)
        assert source_F(np.zeros(3), x, 0.0, ctx) == pytest.approx([0.3 - 0.4 + 0.1] * 3)

    def test_long_time_offsets(self):
        p = params(I=0.3, c=0.2, h=-0.1, eps=1.0, delta=1.0)
        ctx = SourceContext(p, w0=0.4, y0=0.1)
        value = source_F(0.0, 0.0, 1e3, ctx)
        assert value == pytest.approx(0.3 - 0.2 / 0.5 + (-0.1) / 1.0)

    def test_cubic_term(self):
        ctx = SourceContext(params(a=0.25))
        assert source_F(0.5, 0.0, 0.0, ctx) == pytest.approx(0.25 * (1.25 - 0.5))

    def test_profile_shapes(self):
        x = np.linspace(-1.0, 1.0, 5)
        assert np.array_equal(evaluate_profile(2.0, x), np.full(5, 2.0))
        assert np.array_equal(evaluate_profile(np.cos, x), np.cos(x))
        with pytest.raises(DomainError, match="shape"):
            evaluate_profile(np.zeros(4), x)


class TestLinearProblems:
    def test_damped_heat_solution(self):
        p = params()
        solution = picard_solve(gaussian, SourceContext(p), GRID, source=no_source)
        assert solution.meta["converged"] is True
        assert solution.meta["sweeps"] == 1
        x, t = GRID.x, GRID.t
        spread = 1.0 + 4.0 * t[:, None]
        exact = 0.5 / np.sqrt(spread) * np.exp(-x[None, :] ** 2 / spread) * np.exp(-p.a * t)[:, None]
        assert np.max(np.abs(solution.u - exact)) < 1e-3
        assert np.array_equal(solution.u[0], gaussian(x))

    def test_constant_forcing_uses_trapezoid_in_time(self):
        p = params()
        solution = picard_solve(0.0, SourceContext(p), GRID, source=lambda u, x, t: np.full_like(x, 0.3))
        inside = np.abs(GRID.x) <= solution.meta["trusted_half_width"]
        expected = 0.3 * -np.expm1(-p.a * GRID.t) / p.a
        assert np.max(np.abs(solution.u[:, inside] - expected[:, None])) < 1e-6


class TestNonlinearProblem:
    def test_contracts(self):
        p = FhrParams.paper_set(a=-0.98, k=1.0)
        solution = picard_solve(gaussian, SourceContext(p), GRID)
        assert solution.meta["converged"] is True
        assert solution.residuals[-1] <= 1e-10
        assert solution.contraction_ratio < 0.5
        assert solution.w.shape == solution.u.shape
        assert solution.method == "picard"

    def test_sweep_cap_returns_last_iterate(self, caplog):
        p = FhrParams.paper_set(a=-0.98, k=1.0)
        with caplog.at_level(logging.WARNING, logger="rinzelkit.kernel.picard"):
            solution = picard_solve(gaussian, SourceContext(p), GRID, max_sweeps=2, reconstruct=False)
        assert solution.meta["converged"] is False
        assert solution.meta["sweeps"] == 2
        assert solution.w is None
        assert "stopped after 2 sweeps" in caplog.text

    def test_blow_up_is_not_contracting(self):
        grid = PicardGrid(L=20.0, nx=101, nt=20, T=2.0)
        with pytest.raises(ContractionError) as exc_info:
            picard_solve(lambda x: 2.0 * np.exp(-x * x), SourceContext(params()), grid,
                         source=lambda u, x, t: 5.0 * u**3)
        assert len(exc_info.value.residuals) >= 1


class TestDomainChecks:
    def test_initial_data_must_vanish_at_ends(self):
        with pytest.raises(DomainSizeError, match="enlarge L"):
            picard_solve(lambda x: np.exp(-x * x / 25.0), SourceContext(params()), GRID)

    def test_heat_tail_must_be_negligible(self):
        grid = PicardGrid(L=2.0, nx=41, nt=10, T=1.0)
        with pytest.raises(DomainSizeError, match="tail mass"):
            picard_solve(0.0, SourceContext(params()), grid)

    def test_diffusion_required(self):
        with pytest.raises(DomainError, match="D > 0"):
            picard_solve(gaussian, SourceContext(params(D=0.0)), GRID)


def test_slow_fields_for_constant_drive():
    p = params(eps=0.8, beta=0.5, c=0.2, delta=0.5, d=1.0, h=-0.3)
    t = np.linspace(0.0, 2.0, 401)
    x = np.zeros(1)
    u = np.ones((len(t), 1))
    w, y = reconstruct_slow_fields(u, t, SourceContext(p, w0=0.1, y0=0.0), x)
    w_inf = (p.c + 1.0) / p.beta
    y_inf = (p.h - 1.0) / p.d
    np.testing.assert_allclose(w[:, 0], w_inf + (0.1 - w_inf) * np.exp(-p.eta * t), atol=5e-6)
    np.testing.assert_allclose(y[:, 0], y_inf + (0.0 - y_inf) * np.exp(-p.gamma * t), atol=5e-6)
