"""Birkhoff sums over irrational circle rotations, computed exactly where it matters.

Circle points live on the grid of ``2**-P`` (``P <= 127``) and arc
arithmetic is exact.  Floating point only enters through function values
and Monte Carlo estimates.
"""

from .cf import Convergent, RotationNumber, convergents, fixed_convergents, partial_quotients, type_exponents
from .circle import ArcSet, GrowthGauge, PiecewiseFn
from .errors import (BirkhoffLabError, BudgetError, InvariantViolation, PreconditionError)
from .towers import TowerPartition, build_partition

__version__ = "0.1.0"

__all__ = [
    "ArcSet", "BirkhoffLabError", "BudgetError", "Convergent", "GrowthGauge", "InvariantViolation",
    "PiecewiseFn", "PreconditionError", "RotationNumber", "TowerPartition", "build_partition",
    "convergents", "fixed_convergents", "partial_quotients", "type_exponents",
]
