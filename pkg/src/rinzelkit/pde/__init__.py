"""Method-of-lines reference solver and the shared field container."""

from rinzelkit.pde.fields import PdeSolution, read_field_binary, read_field_csv, write_field_binary, write_field_csv
from rinzelkit.pde.grid import Boundary, SpatialGrid
from rinzelkit.pde.mol import pde_jacobian, semidiscretize, solve_pde

__all__ = [
    "Boundary",
    "PdeSolution",
    "SpatialGrid",
    "pde_jacobian",
    "read_field_binary",
    "read_field_csv",
    "semidiscretize",
    "solve_pde",
    "write_field_binary",
    "write_field_csv",
]
