"""Uniform 1-D grid with a boundary closure for the diffusion operator."""

import enum
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from rinzelkit.errors import ConfigError, DomainError


class Boundary(str, enum.Enum):
    ZERO_FLUX = "zero_flux"
    PERIODIC = "periodic"
    HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True)
class SpatialGrid:
    """N nodes on [-L, L] with spacing dx = 2L / (N - 1).

    Closures of the second difference at the end nodes:

    * zero_flux: mirror ghost node, u_{-1} = u_1;
    * periodic: period 2L, so the two end nodes are the same point and both
      take their outer neighbour from the opposite end;
    * homogeneous: ghost value 0 beyond both ends.
    """

    L: float
    N: int
    boundary: Boundary = Boundary.ZERO_FLUX

    def __post_init__(self):
        try:
            object.__setattr__(self, "boundary", Boundary(self.boundary))
        except ValueError:
            raise ConfigError(
                f"Unknown boundary {self.boundary!r} (expected one of: {', '.join(b.value for b in Boundary)})"
            ) from None
        if not (self.N >= 3 and np.isfinite(self.L) and self.L > 0):
            raise DomainError(f"invalid grid: need N >= 3 and L > 0 (got N={self.N}, L={self.L})")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.N)

    def laplacian(self) -> sparse.csr_matrix:
        """Second-order central Laplacian with this grid's closure."""
        n = self.N
        ones = np.ones(n)
        lap = sparse.diags([ones[:-1], -2.0 * ones, ones[:-1]], [-1, 0, 1], format="lil")
        if self.boundary == Boundary.ZERO_FLUX:
            lap[0, 1] = 2.0
            lap[n - 1, n - 2] = 2.0
        elif self.boundary == Boundary.PERIODIC:
            lap[0, n - 2] += 1.0
            lap[n - 1, 1] += 1.0
        return (lap / (self.dx * self.dx)).tocsr()
