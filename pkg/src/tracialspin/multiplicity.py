"""Multiplicities of total spin j in the N-fold tensor power of spin S.

The count ``nu(j, N; S)`` of spin-j blocks obeys

    nu(j, N+1; S) = sum_{j' = |j-S|}^{j+S} nu(j', N; S),

starting from a single spin-S block at N = 1. Every quantum number is an
exact twice-value integer and every count a Python ``int``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterator

from .halfint import HalfInt, as_halfint

__all__ = [
    "DegeneracyTable",
    "advance",
    "degeneracy_table",
    "degeneracy_tables",
    "dimension_sum",
    "nu",
    "table_to_csv",
]


@dataclass(frozen=True)
class DegeneracyTable:
    """Immutable table of ``nu(j, N; S)``.

    ``counts[k]`` is the multiplicity of ``2j = two_j_min + 2k``; the dense
    range runs up to ``2j = N * 2S``.
    """

    spin: HalfInt
    n_particles: int
    counts: tuple[int, ...]

    def __post_init__(self):
        expected = (self.two_j_max - self.two_j_min) // 2 + 1
        if len(self.counts) != expected:
            raise ValueError(f"expected {expected} counts, got {len(self.counts)}")

    @property
    def two_j_min(self) -> int:
        return (self.n_particles * self.spin.twice) % 2

    @property
    def two_j_max(self) -> int:
        return self.n_particles * self.spin.twice

    @property
    def two_js(self) -> range:
        return range(self.two_j_min, self.two_j_max + 1, 2)

    @property
    def hilbert_dimension(self) -> int:
        return (self.spin.twice + 1) ** self.n_particles

    def items(self) -> Iterator[tuple[int, int]]:
        """Yield ``(2j, nu)`` pairs in ascending j."""
        return zip(self.two_js, self.counts)

    def count(self, two_j: int) -> int:
        if two_j < self.two_j_min or two_j > self.two_j_max or (two_j - self.two_j_min) % 2:
            return 0
        return self.counts[(two_j - self.two_j_min) // 2]


def _check_inputs(spin: HalfInt, n_particles: int) -> None:
    if spin.twice < 1:
        raise ValueError(f"spin must be positive, got {spin}")
    if not isinstance(n_particles, int) or isinstance(n_particles, bool) or n_particles < 1:
        raise ValueError(f"number of particles must be a positive integer, got {n_particles!r}")


def _single_particle(spin: HalfInt) -> DegeneracyTable:
    two_j_min = spin.twice % 2
    counts = [0] * ((spin.twice - two_j_min) // 2 + 1)
    counts[-1] = 1
    return DegeneracyTable(spin, 1, tuple(counts))


def advance(table: DegeneracyTable) -> DegeneracyTable:
    """Couple one more spin-S particle onto ``table``.

    The window ``[|j-S|, j+S]`` is summed through a prefix-sum array, so a
    step costs O(N S) big-integer additions rather than O(N S^2).
    """
    two_s = table.spin.twice
    old_min = table.two_j_min
    old = table.counts
    prefix = [0, *accumulate(old)]
    n_new = table.n_particles + 1
    new_min = (n_new * two_s) % 2
    new_max = n_new * two_s
    counts = []
    for two_j in range(new_min, new_max + 1, 2):
        # |2j - 2S| has the parity of old_min, so these offsets are integral
        lo = (abs(two_j - two_s) - old_min) // 2
        hi = min((two_j + two_s - old_min) // 2, len(old) - 1)
        counts.append(prefix[hi + 1] - prefix[lo] if hi >= lo else 0)
    return DegeneracyTable(table.spin, n_new, tuple(counts))


def degeneracy_tables(spin, n_max: int) -> Iterator[DegeneracyTable]:
    """Yield the tables for N = 1, 2, ..., ``n_max`` in order."""
    spin = as_halfint(spin)
    _check_inputs(spin, n_max)
    table = _single_particle(spin)
    yield table
    for _ in range(n_max - 1):
        table = advance(table)
        yield table


_CACHE: dict[tuple[int, int], DegeneracyTable] = {}


def degeneracy_table(spin, n_particles: int) -> DegeneracyTable:
    """Exact ``nu(j, N; S)`` for all admissible j, memoized on ``(2S, N)``.

    >>> dict(degeneracy_table("1/2", 4).items())
    {0: 2, 2: 3, 4: 1}
    """
    spin = as_halfint(spin)
    _check_inputs(spin, n_particles)
    key = (spin.twice, n_particles)
    if key in _CACHE:
        return _CACHE[key]
    cached = [n for (two_s, n) in _CACHE if two_s == spin.twice and n < n_particles]
    table = _CACHE[(spin.twice, max(cached))] if cached else _single_particle(spin)
    while table.n_particles < n_particles:
        table = advance(table)
    # only requested tables are kept; intermediates would cost O(N^2 S) big ints
    _CACHE[key] = table
    return table


def dimension_sum(table: DegeneracyTable) -> int:
    """Sum of ``(2j+1) nu(j)``; equals ``(2S+1)**N`` for a valid table."""
    return sum((two_j + 1) * count for two_j, count in table.items())


def nu(table: DegeneracyTable, j) -> int:
    """Multiplicity of total spin ``j``; zero off the admissible set."""
    return table.count(as_halfint(j).twice)


def table_to_csv(table: DegeneracyTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["two_j", "count"])
    for two_j, count in table.items():
        writer.writerow([two_j, count])
    return out.getvalue()
