"""Tests for rinzelkit.pde.grid."""

import numpy as np
import pytest

from rinzelkit.errors import ConfigError, DomainError
from rinzelkit.pde.grid import Boundary, SpatialGrid


class TestSpatialGrid:
    def test_nodes(self):
        grid = SpatialGrid(1.0, 21)
        assert grid.dx == pytest.approx(0.1)
        assert grid.x[0] == -1.0 and grid.x[-1] == 1.0
        assert grid.boundary is Boundary.ZERO_FLUX

    def test_boundary_from_string(self):
        assert SpatialGrid(1.0, 5, "periodic").boundary is Boundary.PERIODIC

    def test_unknown_boundary(self):
        with pytest.raises(ConfigError, match="open"):
            SpatialGrid(1.0, 5, "open")

    @pytest.mark.parametrize("L, N", [(1.0, 2), (0.0, 5), (float("inf"), 5)])
    def test_invalid(self, L, N):
        with pytest.raises(DomainError, match="invalid grid"):
            SpatialGrid(L, N)


class TestLaplacian:
    def test_zero_flux_mirror_rows(self):
        lap = SpatialGrid(1.0, 5).laplacian().toarray() * 0.5**2
        assert lap[0, :3].tolist() == [-2.0, 2.0, 0.0]
        assert lap[4, 2:].tolist() == [0.0, 2.0, -2.0]

    @pytest.mark.parametrize("boundary", [Boundary.ZERO_FLUX, Boundary.PERIODIC])
    def test_constants_in_kernel(self, boundary):
        lap = SpatialGrid(2.0, 11, boundary).laplacian()
        assert np.max(np.abs(lap @ np.ones(11))) == 0.0

    def test_periodic_wraps_across_shared_end_node(self):
        lap = SpatialGrid(1.0, 5, Boundary.PERIODIC).laplacian().toarray() * 0.5**2
        assert lap[0, 1] == 1.0 and lap[0, 3] == 1.0
        assert lap[4, 3] == 1.0 and lap[4, 1] == 1.0

    def test_homogeneous_ghost_is_zero(self):
        lap = SpatialGrid(1.0, 5, Boundary.HOMOGENEOUS).laplacian().toarray() * 0.5**2
        assert lap[0, :2].tolist() == [-2.0, 1.0]
        assert (lap @ np.ones(5))[0] == -1.0

    def test_second_order_on_smooth_periodic_data(self):
        errors = []
        for n in (21, 41, 81):
            grid = SpatialGrid(1.0, n, Boundary.PERIODIC)
            u = np.cos(np.pi * grid.x)
            errors.append(np.max(np.abs(grid.laplacian() @ u + np.pi**2 * u)))
        assert np.log2(errors[0] / errors[1]) == pytest.approx(2.0, abs=0.1)
        assert np.log2(errors[1] / errors[2]) == pytest.approx(2.0, abs=0.1)
