"""Hecke L-functions of class-number-one quadratic fields, the kernel Phi_K,
its shuffle algebra, intertwiner local factors and Fourier analysis on B."""
from .errors import ConvergenceError, HeckeShuffleError, PreconditionError
from .lfunction import (
    Estimate,
    Kernel,
    SpectralPoint,
    TruncationPolicy,
    l_dirichlet,
    l_euler,
    l_star,
    phi_K,
)
from .numberfield import NumberField, make_field, prime_ideals_up_to, unit_lattice, whitelisted_fields

__all__ = [
    "ConvergenceError",
    "Estimate",
    "HeckeShuffleError",
    "Kernel",
    "NumberField",
    "PreconditionError",
    "SpectralPoint",
    "TruncationPolicy",
    "l_dirichlet",
    "l_euler",
    "l_star",
    "make_field",
    "phi_K",
    "prime_ideals_up_to",
    "unit_lattice",
    "whitelisted_fields",
]
__version__ = "0.1.0"
