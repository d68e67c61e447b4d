"""Numerical laboratory for quadratic Dedekind zeta functions.

Hybrid Euler-Hadamard products, arithmetic moment constants, moments of
the critical-line factors, and the permutation-sum machinery behind
moment conjectures for non-primitive L-functions.
"""

__version__ = "0.1.0"

from .fields import QuadraticField, SplitType, build_field, kronecker

__all__ = ["QuadraticField", "SplitType", "build_field", "kronecker", "__version__"]
