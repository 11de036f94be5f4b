"""Exact statistics of N randomly oriented spin-S particles."""

from .halfint import HalfInt, as_halfint, parse_spin
from .multiplicity import DegeneracyTable, degeneracy_table, dimension_sum, nu

__all__ = [
    "DegeneracyTable",
    "HalfInt",
    "as_halfint",
    "degeneracy_table",
    "dimension_sum",
    "nu",
    "parse_spin",
]

__version__ = "0.1.0"
