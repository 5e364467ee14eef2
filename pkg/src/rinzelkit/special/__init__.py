"""Special functions."""

from rinzelkit.special.bessel import bessel_j0, bessel_j1, bessel_j2, j1_over_x

__all__ = ["bessel_j0", "bessel_j1", "bessel_j2", "j1_over_x"]
