"""Normalized traces of words in the collective spin operators J+, J-, Jz.

The product space splits into ``nu(j, N; S)`` copies of each spin-j irrep, so

    (2S+1)^{-N} tr W = sum_j nu(j, N; S) / (2S+1)^N  tr_j W,

which replaces a ``(2S+1)^N``-dimensional trace by a sum over at most
``NS + 1`` small blocks. The N -> infinity moments of ``Jz / sqrt(N)`` are
those of a centred Gaussian of variance S(S+1)/3.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

from .distributions import prob_m
from .halfint import HalfInt, as_halfint
from .multiplicity import DegeneracyTable, degeneracy_table
from .oracles import kronecker_space

__all__ = [
    "IrrepMatrices",
    "InversionResult",
    "SpinWord",
    "asymptotic_moment",
    "asymptotic_moment_exact",
    "char_function",
    "char_function_moments",
    "invert_char_function",
    "irrep_matrices",
    "irrep_trace_table",
    "kronecker_trace_oracle",
    "moment_convergence_scan",
    "normalized_trace",
    "scan_to_json",
    "z_moment_exact",
]

_LETTERS = frozenset("+-z")


@dataclass(frozen=True)
class SpinWord:
    """Operator product ``coefficient * L_1 L_2 ... L_k`` read left to right.

    ``letters`` uses ``+`` for J+, ``-`` for J- and ``z`` for Jz. With
    ``scaled`` set every letter carries a factor ``N^{-1/2}``.
    """

    letters: str
    coefficient: float = 1.0
    scaled: bool = False

    def __post_init__(self):
        bad = set(self.letters) - _LETTERS
        if bad:
            raise ValueError(f"unknown letters {sorted(bad)} in spin word {self.letters!r}")

    @property
    def grading(self) -> int:
        return self.letters.count("+") - self.letters.count("-")

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class IrrepMatrices:
    j: HalfInt
    raising: np.ndarray
    lowering: np.ndarray
    z: np.ndarray

    def casimir(self) -> np.ndarray:
        return self.lowering @ self.raising + self.z @ self.z + self.z


def irrep_matrices(j) -> IrrepMatrices:
    """Dense ladder matrices in the basis ``m = j, j-1, ..., -j``."""
    j = as_halfint(j)
    if j.twice < 0:
        raise ValueError("j must be non-negative")
    jv = j.twice / 2
    m = jv - np.arange(j.twice + 1)
    raising = np.diag(np.sqrt((jv - m[1:]) * (jv + m[1:] + 1)), 1)
    return IrrepMatrices(j, raising, raising.T.copy(), np.diag(m))


@lru_cache(maxsize=256)
def _irrep_basis(two_s: int, n_particles: int):
    """Every basis state of every irrep as (2j, 2m, multiplicity), integers."""
    table = degeneracy_table(HalfInt(two_s), n_particles)
    two_j, two_m, count = [], [], []
    for tj, c in table.items():
        if c == 0:
            continue
        two_j.extend([tj] * (tj + 1))
        two_m.extend(range(tj, -tj - 1, -2))
        count.extend([c] * (tj + 1))
    return (np.array(two_j, dtype=object), np.array(two_m, dtype=object),
            np.array(count, dtype=object), table.hilbert_dimension)


_isqrt = np.frompyfunc(math.isqrt, 1, 1)


def _irrep_trace(letters: str, two_s: int, n_particles: int) -> Fraction:
    """Exact ``(2S+1)^{-N} tr W`` for a word of zero m-grading.

    Every letter maps |j,m> to a multiple of a single basis vector, so all
    states advance together. A zero-grading word walks a closed path in m,
    crossing each edge as often upwards as downwards; the product F of the
    (doubled) ladder factors is then a perfect square and the amplitude is
    ``isqrt(F)``, so the trace is an exact rational.
    """
    tj, m0, count, dim = _irrep_basis(two_s, n_particles)
    # work in doubled units: 2m, and 4 (j -/+ m)(j +/- m + 1)
    m = m0.copy()
    zf = np.ones(m.size, dtype=object)
    sq = np.ones(m.size, dtype=object)
    for letter in reversed(letters):
        if letter == "z":
            zf = zf * m
        elif letter == "+":
            sq = sq * ((tj - m) * (tj + m + 2))
            m = m + 2
        else:
            sq = sq * ((tj + m) * (tj - m + 2))
            m = m - 2
    # out-of-range steps hit a zero factor; sq stays a non-negative square
    total = int(np.dot(count, zf * _isqrt(sq))) if m.size else 0
    return Fraction(total, dim * 2 ** len(letters))


def normalized_trace(word: SpinWord, spin, n_particles: int) -> float:
    """``(2S+1)^{-N} tr W`` through the irrep decomposition.

    The trace is accumulated exactly and rounded once, so words whose trace
    cancels to zero give 0.0 at any S. Non-zero m-grading returns 0.0
    before any arithmetic.
    """
    spin = as_halfint(spin)
    if word.grading != 0 or word.coefficient == 0:
        return 0.0
    value = float(_irrep_trace(word.letters, spin.twice, n_particles))
    if word.scaled:
        value /= n_particles ** (len(word) / 2)
    return word.coefficient * value


def kronecker_trace_oracle(word: SpinWord, spin, n_particles: int) -> float:
    """The same normalized trace, taken literally on the product space."""
    spin = as_halfint(spin)
    space = kronecker_space(spin.twice, n_particles)
    value = space.trace(word.letters) / space.dimension
    if word.scaled:
        value /= n_particles ** (len(word) / 2)
    return word.coefficient * value


def z_moment_exact(spin, n_particles: int, power: int, scaled: bool = True) -> Fraction:
    """Exact ``(2S+1)^{-N} tr (Jz / sqrt(N))^power`` for even ``power``.

    Jz is diagonal with the law P(m, N), so this is a rational moment sum.
    """
    if power % 2:
        return Fraction(0)
    dist = prob_m(degeneracy_table(spin, n_particles))
    total = sum(tm**power * w for tm, w in zip(dist.support, dist.weights))
    value = Fraction(total, 2**power * dist.denominator)
    if scaled:
        value /= n_particles ** (power // 2)
    return value


def asymptotic_moment_exact(spin, ell: int) -> Fraction:
    """``(2l)! / (2^l l!) [S(S+1)/3]^l`` as a rational."""
    spin = as_halfint(spin)
    if ell < 0:
        raise ValueError("ell must be non-negative")
    double_factorial = Fraction(math.factorial(2 * ell), 2**ell * math.factorial(ell))
    return double_factorial * (spin.casimir() / 3) ** ell


def asymptotic_moment(spin, ell: int) -> float:
    return float(asymptotic_moment_exact(spin, ell))


def char_function(spin, t):
    spin = as_halfint(spin)
    D = float(spin.casimir()) / 6.0
    t = np.asarray(t, dtype=float)
    return np.exp(-D * t * t)


def char_function_moments(spin, ell_max: int, radius: float = 1.0, points: int = 64) -> list[float]:
    """Even moments read off the Taylor coefficients of the characteristic function.

    ``Phi^{(k)}(0)`` comes from a trapezoidal Cauchy integral on a circle of
    the given radius (the function is entire); the 2l-th moment is
    ``(-1)^l Phi^{(2l)}(0)``.
    """
    spin = as_halfint(spin)
    D = float(spin.casimir()) / 6.0
    theta = 2 * math.pi * np.arange(points) / points
    z = radius * np.exp(1j * theta)
    values = np.exp(-D * z * z)
    moments = []
    for ell in range(ell_max + 1):
        k = 2 * ell
        coeff = np.mean(values * np.exp(-1j * k * theta)) / radius**k
        moments.append(float(((-1) ** ell * math.factorial(k) * coeff).real))
    return moments


@dataclass(frozen=True)
class InversionResult:
    value: float
    truncation_bound: float
    cutoff: float


def invert_char_function(spin, m: float, tail: float = 1e-16) -> InversionResult:
    """``(2 pi)^{-1} int Phi(t) exp(-i t m) dt`` by composite Simpson on [0, T].

    T is chosen so Phi(T) < ``tail``; the neglected part is bounded by the
    Gaussian tail integral ``erfc(sqrt(D) T) / (2 sqrt(pi D))``.
    """
    spin = as_halfint(spin)
    D = float(spin.casimir()) / 6.0
    cutoff = math.sqrt(-math.log(tail) / D)
    # resolve both the envelope and the oscillation, keep an even interval count
    intervals = 2 * max(400, math.ceil(cutoff * (abs(m) + 1.0) * 8))
    t = np.linspace(0.0, cutoff, intervals + 1)
    integrand = np.exp(-D * t * t) * np.cos(t * m)
    value = simpson(integrand, x=t) / math.pi
    bound = math.erfc(math.sqrt(D) * cutoff) / (2.0 * math.sqrt(math.pi * D))
    return InversionResult(float(value), bound, cutoff)


def moment_convergence_scan(spin, ell: int, n_list) -> list[dict]:
    """Distance of the exact scaled moment from its N -> infinity limit.

    Reports one row per N with exact rational values converted at the end,
    so the l <= 1 rows are exactly zero.
    """
    spin = as_halfint(spin)
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise ValueError("N list must be ascending")
    reference = asymptotic_moment_exact(spin, ell)
    rows = []
    for n in n_list:
        value = z_moment_exact(spin, n, 2 * ell)
        rows.append(
            {
                "word": "z" * (2 * ell),
                "S": str(spin),
                "N": n,
                "value": float(value),
                "reference_value": float(reference),
                "abs_error": float(abs(value - reference)),
            }
        )
    return rows


def scan_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, sort_keys=True, indent=2) + "\n"


def irrep_trace_table(word: SpinWord, table: DegeneracyTable) -> dict[int, float]:
    """Per-irrep traces ``tr_j W`` (unweighted), keyed by 2j."""
    out = {}
    for two_j, _ in table.items():
        mats = irrep_matrices(HalfInt(two_j))
        lookup = {"+": mats.raising, "-": mats.lowering, "z": mats.z}
        acc = np.eye(two_j + 1)
        for letter in word.letters:
            acc = acc @ lookup[letter]
        out[two_j] = float(np.trace(acc))
    return out
