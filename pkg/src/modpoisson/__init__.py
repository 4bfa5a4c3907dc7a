"""Exact and numerical verification of mod-Poisson convergence.

Covers cycle counts of random permutations, irreducible-factor counts of
polynomials over finite fields, and prime-factor counts of integers.
"""

from .errors import (
    DegenerateFrequency,
    InvalidArgument,
    ModPoissonError,
    ResourceLimit,
    TruncationNotReached,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFrequency",
    "InvalidArgument",
    "ModPoissonError",
    "ResourceLimit",
    "TruncationNotReached",
]
