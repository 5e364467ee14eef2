"""Tests for rinzelkit.kernel.fundamental."""

import math

import numpy as np
import pytest
from scipy import integrate, special

from rinzelkit.errors import AccuracyError, DomainError
from rinzelkit.kernel.fundamental import h, h1, h2, heat_kernel, kernel_field
from rinzelkit.model.params import FhrParams


def params(**values):
    base = dict(D=1.0, a=0.3, I=0.0, eps=0.0, beta=0.5, c=0.0, d=1.0, h=0.0, delta=0.0, k=1.0)
    base.update(values)
    return FhrParams(**base)


def first_order_memory(x, t, D, a, rate):
    """int_0^t G(x, y) e^{-a y - rate (t - y)} y dy, the O(eps) part of the memory correction."""
    value, _ = integrate.quad(
        lambda y: float(heat_kernel(x, y, D)) * math.exp(-a * y - rate * (t - y)) * y if y > 0 else 0.0,
        0.0, t, epsabs=1e-15, epsrel=1e-12, limit=200,
    )
    return value


def h1_integrand(y, x, t, D, a, eps, rate):
    """Correction integrand of H1 in the original variable y in [0, t]."""
    y = np.asarray(y, dtype=float)
    z = 2.0 * np.sqrt(eps * y * (t - y))
    with np.errstate(divide="ignore", invalid="ignore"):
        gauss = np.exp(-x * x / (4.0 * D * y) - a * y - rate * (t - y))
        # J1(z) / sqrt(t - y) = (J1(z) / z) * 2 sqrt(eps y), regular at y = t.
        ratio = np.where(z > 0, special.j1(z) / z, 0.5)
    return np.where(y > 0, gauss, 0.0) * eps * np.sqrt(y) / math.sqrt(math.pi * D) * ratio


def trapezoid_h1(x, t, p, panels):
    y = np.linspace(0.0, t, panels + 1)
    correction = integrate.trapezoid(h1_integrand(y, x, t, p.D, p.a, p.eps, p.eta), y)
    return float(heat_kernel(x, t, p.D)) * math.exp(-p.a * t) - correction


def trapezoid_h2(x, t, p, panels):
    """Outer trapezoid over y of H1(x, y) times the delta memory weight, H1 itself by trapezoid."""
    ys = np.linspace(0.0, t, panels + 1)
    inner = np.zeros_like(ys)
    for j, y in enumerate(ys[1:], start=1):
        inner[j] = trapezoid_h1(x, y, p, panels)
    z = 2.0 * np.sqrt(p.delta * ys * (t - ys))
    with np.errstate(invalid="ignore"):
        ratio = np.where(z > 0, special.j1(z) / z, 0.5)
    weight = np.exp(-p.gamma * (t - ys)) * 2.0 * p.delta * ys * ratio
    return float(integrate.trapezoid(inner * weight, ys))


class TestHeatKernel:
    def test_unit_mass(self):
        mass, _ = integrate.quad(lambda x: float(heat_kernel(x, 0.7, 2.0)), -np.inf, np.inf)
        assert mass == pytest.approx(1.0, rel=1e-12)

    def test_peak(self):
        assert heat_kernel(0.0, 1.0, 1.0) == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)))


class TestDegenerateKernel:
    def test_no_memory_is_damped_heat(self):
        p = params()
        for x in (-2.0, 0.0, 0.5, 3.0):
            for t in (0.1, 1.0, 4.0):
                value = h(x, t, p)
                expected = float(heat_kernel(x, t, p.D)) * math.exp(-p.a * t)
                assert abs(value.value - expected) < 1e-10
                assert value.error == 0.0

    def test_grid_matches_damped_heat(self):
        p = params(a=-0.98)
        xs = np.linspace(-5.0, 5.0, 21)
        ts = np.linspace(0.1, 2.1, 11)
        field = kernel_field(p, xs, ts)
        expected = heat_kernel(xs[None, :], ts[:, None], p.D) * np.exp(-p.a * ts)[:, None]
        assert field.H.shape == (11, 21)
        assert np.max(np.abs(field.H - expected)) < 1e-10

    @pytest.mark.parametrize("a", [-0.98, 0.0, 0.5])
    @pytest.mark.parametrize("t", [0.2, 1.0, 3.0])
    def test_mass_is_damping_factor(self, a, t):
        p = params(a=a)
        mass, _ = integrate.quad(lambda x: h(x, t, p).value, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        assert mass == pytest.approx(math.exp(-a * t), rel=1e-8)

    def test_symmetric_in_x(self):
        p = params(eps=0.8, delta=0.5, d=1.0)
        assert h1(1.3, 0.8, p).value == pytest.approx(h1(-1.3, 0.8, p).value, rel=1e-12)


class TestMemoryCorrections:
    @pytest.mark.parametrize("x", [0.0, 0.7])
    def test_h1_small_eps_expansion(self, x):
        eps = 1e-6
        p = params(eps=eps)
        value = h1(x, 1.0, p, tol=1e-14)
        damped = float(heat_kernel(x, 1.0, p.D)) * math.exp(-p.a)
        expected = first_order_memory(x, 1.0, p.D, p.a, p.eta)
        assert (damped - value.value) / eps == pytest.approx(expected, rel=1e-4)

    @pytest.mark.parametrize("x", [0.0, 0.7])
    def test_h2_small_delta_expansion(self, x):
        delta = 1e-6
        p = params(delta=delta, d=2.0)
        value = h2(x, 1.0, p, tol=1e-14)
        expected = first_order_memory(x, 1.0, p.D, p.a, p.gamma)
        assert value.value / delta == pytest.approx(expected, rel=1e-4)

    def test_composite_is_difference(self):
        p = params(eps=0.8, delta=0.5, beta=0.126)
        whole = h(0.4, 0.5, p)
        assert whole.value == pytest.approx(h1(0.4, 0.5, p, 5e-11).value - h2(0.4, 0.5, p, 5e-11).value, abs=1e-10)
        assert whole.error <= 1e-10


class TestBruteForceOracles:
    GENERIC = dict(D=1.0, a=0.5, eps=0.8, beta=0.126)

    def test_h1_against_fine_trapezoid(self):
        p = params(**self.GENERIC)
        assert abs(h1(0.5, 1.0, p).value - trapezoid_h1(0.5, 1.0, p, 10**6)) < 1e-8

    def test_h2_against_double_trapezoid(self):
        p = params(**self.GENERIC, delta=0.5, d=1.0)
        value = h2(0.5, 1.0, p, tol=1e-8)
        assert abs(value.value - trapezoid_h2(0.5, 1.0, p, 1000)) < 1e-6

    def test_trapezoid_converges_to_quadrature_at_second_order(self):
        p = params(**self.GENERIC)
        reference = h1(0.5, 1.0, p, tol=1e-13).value
        panels = np.array([100, 200, 400, 800])
        errors = np.array([abs(trapezoid_h1(0.5, 1.0, p, n) - reference) for n in panels])
        slope = np.polyfit(np.log(panels), np.log(errors), 1)[0]
        assert slope == pytest.approx(-2.0, abs=0.5)
        assert np.all(np.diff(errors) < 0)


class TestFailures:
    @pytest.mark.parametrize("t", [0.0, -1.0, math.nan])
    def test_time_must_be_positive(self, t):
        with pytest.raises(DomainError, match="t > 0"):
            h1(0.0, t, params(eps=0.5))

    def test_diffusion_must_be_positive(self):
        with pytest.raises(DomainError, match="D > 0"):
            h(0.0, 1.0, params(D=0.0))

    def test_negative_memory_rate(self):
        with pytest.raises(DomainError, match="eps >= 0"):
            h(0.0, 1.0, params(eps=-0.1))

    def test_budget_exhausted_carries_estimate(self):
        with pytest.raises(AccuracyError) as exc_info:
            h1(0.0, 20.0, params(a=0.0, eps=1.0), tol=1e-12, max_subdivisions=1)
        err = exc_info.value
        assert err.error > err.tol == 1e-12
        assert math.isfinite(err.value)


class TestKernelField:
    def test_shapes_and_components(self, tmp_path):
        p = params()
        field = kernel_field(p, [-1.0, 0.0, 1.0], [0.5, 1.0])
        assert field.H.shape == (2, 3)
        assert np.array_equal(field.H, field.H1)
        with pytest.raises(DomainError, match="H3"):
            field.component("H3")

    def test_workers_agree(self):
        p = params(eps=0.8, delta=0.5)
        serial = kernel_field(p, [0.0, 1.0], [0.25, 0.5], tol=1e-8, jobs=1)
        pooled = kernel_field(p, [0.0, 1.0], [0.25, 0.5], tol=1e-8, jobs=2)
        assert np.array_equal(serial.H, pooled.H)
        assert np.all(serial.error <= 1e-8)
