"""Odd-symmetry lifting of radial Levy operators and antisymmetric boundary Harnack checks."""
from .errors import *  # noqa: F401,F403
from .kernels import (
    FractionalKernelSpec,
    RadialKernel,
    fractional_kernel,
    gaussian_kernel,
    lift_kernel,
    rational_kernel,
    table_kernel,
    unlift_kernel,
)
from .lift import Field, lift_field, restrict_field, weighted_norm_As, weighted_norm_Ls
from .quadrature import QuadratureSpec
from .symbols import RadialSymbol, fractional_symbol, symbol_from_kernel

__version__ = "0.1.0"

__all__ = [
    "FractionalKernelSpec",
    "RadialKernel",
    "fractional_kernel",
    "gaussian_kernel",
    "lift_kernel",
    "rational_kernel",
    "table_kernel",
    "unlift_kernel",
    "Field",
    "lift_field",
    "restrict_field",
    "weighted_norm_As",
    "weighted_norm_Ls",
    "QuadratureSpec",
    "RadialSymbol",
    "fractional_symbol",
    "symbol_from_kernel",
]
