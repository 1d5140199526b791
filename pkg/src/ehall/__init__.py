"""Exact computations in the elliptic Hall algebra.

Subpackages:
  kfield        arithmetic in K = Q(sigma, sigmabar) and specializations
  lattice       segments, paths, convexity, areas, minimal paths
  shuffle       the shuffle model of the positive half
  presentation  Drinfeld generator modes, normal forms and certifiers
  hopf          truncated coproduct
  cli           expression evaluator and verification suites
"""

from .kfield import FieldElem, LaurentPoly2, RationalDomain, SymbolicDomain, alpha
from .lattice import Path, Region
from .shuffle import ShuffleAlgebra, SymLaurent

__all__ = [
    "FieldElem",
    "LaurentPoly2",
    "RationalDomain",
    "SymbolicDomain",
    "alpha",
    "Path",
    "Region",
    "ShuffleAlgebra",
    "SymLaurent",
]

__version__ = "0.1.0"
