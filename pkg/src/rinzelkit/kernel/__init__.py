"""Fundamental solution of the linearized operator and the Picard route built on it."""

from rinzelkit.kernel.fundamental import KernelField, KernelValue, h, h1, h2, heat_kernel, kernel_field
from rinzelkit.kernel.picard import PicardGrid, picard_solve, reconstruct_slow_fields
from rinzelkit.kernel.source import SourceContext, source_F

__all__ = [
    "KernelField",
    "KernelValue",
    "PicardGrid",
    "SourceContext",
    "h",
    "h1",
    "h2",
    "heat_kernel",
    "kernel_field",
    "picard_solve",
    "reconstruct_slow_fields",
    "source_F",
]
