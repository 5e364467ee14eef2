"""Tests for rinzelkit.kernel.tables."""

import math

import numpy as np
import pytest

from rinzelkit.kernel.fundamental import h
from rinzelkit.kernel.tables import build_tables, hat_h, hat_heat, theta_rule
from rinzelkit.model.params import FhrParams


def params(**values):
    base = dict(D=1.0, a=0.3, I=0.0, eps=0.0, beta=0.5, c=0.0, d=1.0, h=0.0, delta=0.0, k=1.0)
    base.update(values)
    return FhrParams(**base)


def test_theta_rule_integrates_sin_squared():
    s, c, w = theta_rule(20)
    assert np.sum(w) == pytest.approx(math.pi / 2, rel=1e-14)
    assert np.sum(w * s * s) == pytest.approx(math.pi / 4, rel=1e-14)
    assert np.all((s > 0) & (c > 0))


class TestHatHeat:
    def test_time_zero_is_identity(self):
        dx = 0.1
        row = hat_heat(dx * np.arange(-3, 4), 0.0, 1.0, dx)
        np.testing.assert_allclose(row, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_row_sums_to_unit_mass(self):
        dx = 0.05
        row = hat_heat(dx * np.arange(-400, 401), 0.3, 1.0, dx)
        assert np.sum(row) == pytest.approx(1.0, rel=1e-9)

    def test_fine_grid_matches_pointwise_kernel(self):
        dx = 1e-3
        x = np.array([0.0, 0.5, 1.0])
        smoothed = hat_heat(x, 0.4, 1.0, dx)
        pointwise = np.exp(-x * x / 1.6) / (2.0 * math.sqrt(math.pi * 0.4))
        np.testing.assert_allclose(smoothed / dx, pointwise, rtol=1e-6)


class TestHatKernel:
    def test_degenerate_is_damped_heat(self):
        p = params()
        dx = 0.05
        x = dx * np.arange(20)
        np.testing.assert_allclose(hat_h(x, 0.5, p, dx, theta_rule()), hat_heat(x, 0.5, 1.0, dx) * math.exp(-0.15),
                                   rtol=1e-14)

    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_matches_adaptive_kernel(self, t):
        p = params(eps=0.8, beta=0.126, delta=0.5)
        dx = 1e-3
        x = np.array([0.0, 0.6])
        smoothed = hat_h(x, t, p, dx, theta_rule()) / dx
        for xi, value in zip(x, smoothed):
            assert value == pytest.approx(h(float(xi), t, p, tol=1e-10).value, rel=1e-5, abs=1e-9)


class TestBuildTables:
    def test_rows_and_lags(self):
        p = params(eps=0.5, delta=0.2)
        tables = build_tables(p, 0.1, 11, [0.0, 0.05, 0.1], order=20)
        assert tables.K.shape == (3, 21)
        assert tables.lags[0] == pytest.approx(-1.0)
        np.testing.assert_allclose(tables.K[0], np.eye(21)[10], atol=1e-14)
        np.testing.assert_array_equal(tables.K[2], tables.K[2][::-1])

    def test_workers_agree(self):
        p = params(eps=0.5, delta=0.2)
        serial = build_tables(p, 0.1, 11, [0.05, 0.1, 0.15], order=20, jobs=1)
        pooled = build_tables(p, 0.1, 11, [0.05, 0.1, 0.15], order=20, jobs=2)
        np.testing.assert_array_equal(serial.K, pooled.K)
