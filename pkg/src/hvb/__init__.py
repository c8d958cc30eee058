"""Homogeneous vector bundles on abelian varieties, modelled as modules."""

from .errors import DecompositionError, HVBError, InputError, UnsupportedRegimeError
from .exactfield import GF, QQ, ExactMatrix, kernel_basis, rank, solve

__all__ = [
    "DecompositionError", "HVBError", "InputError", "UnsupportedRegimeError",
    "GF", "QQ", "ExactMatrix", "kernel_basis", "rank", "solve",
]
__version__ = "0.1.0"
