"""Brute-force references that never touch the multiplicity recurrence.

Everything here is exponential in N and exists to validate the fast paths:
collective spin operators built literally from Kronecker products, the
spectrum of their Casimir, and the N-fold convolution of uniform z-steps.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .halfint import HalfInt, as_halfint

__all__ = [
    "KRONECKER_DIMENSION_CAP",
    "KroneckerSpace",
    "casimir_multiplicities",
    "kronecker_space",
    "uniform_convolution",
]

KRONECKER_DIMENSION_CAP = 4096
# extended precision keeps rounding noise on exactly cancelling traces
# well below the comparison tolerance at large S
ORACLE_DTYPE = np.longdouble


def _single_site(spin: HalfInt):
    """Sparse (J+, J-, Jz) for one spin in the basis m = S, S-1, ..., -S."""
    s = np.longdouble(spin.twice) / 2
    m = s - np.arange(spin.twice + 1, dtype=np.longdouble)
    # <m+1|J+|m> sits one row above the diagonal in this ordering
    raise_elems = np.sqrt((s - m[1:]) * (s + m[1:] + 1))
    raising = sp.diags(raise_elems, 1, format="csr", dtype=ORACLE_DTYPE)
    return raising, raising.T.tocsr(), sp.diags(m, 0, format="csr", dtype=ORACLE_DTYPE)


class KroneckerSpace:
    """Collective operators on the full ``(2S+1)**N``-dimensional space.

    Operator products are memoized by letter string, half-words reused
    across many traces.
    """

    def __init__(self, spin, n_particles: int, cap: int = KRONECKER_DIMENSION_CAP):
        self.spin = as_halfint(spin)
        self.n_particles = n_particles
        self.local_dim = self.spin.twice + 1
        self.dimension = self.local_dim**n_particles
        if self.dimension > cap:
            raise ValueError(
                f"Kronecker oracle capped at dimension {cap}, "
                f"(2S+1)^N = {self.dimension} for S={self.spin}, N={n_particles}"
            )
        single = _single_site(self.spin)
        self.operators = {
            letter: self._collective(op) for letter, op in zip("+-z", single)
        }
        self._products: dict[str, sp.csr_matrix] = {}
        self._transposes: dict[str, sp.csr_matrix] = {}

    def _collective(self, op):
        total = sp.csr_matrix((self.dimension, self.dimension), dtype=ORACLE_DTYPE)
        for site in range(self.n_particles):
            left = sp.identity(self.local_dim**site, format="csr", dtype=ORACLE_DTYPE)
            right = sp.identity(self.local_dim ** (self.n_particles - site - 1), format="csr", dtype=ORACLE_DTYPE)
            total = total + sp.kron(sp.kron(left, op), right, format="csr")
        return total.tocsr()

    def product(self, letters: str):
        if letters == "":
            return sp.identity(self.dimension, format="csr", dtype=ORACLE_DTYPE)
        if letters not in self._products:
            if len(letters) == 1:
                self._products[letters] = self.operators[letters]
            else:
                self._products[letters] = (
                    self.product(letters[:1]) @ self.product(letters[1:])
                ).tocsr()
        return self._products[letters]

    def trace(self, letters: str) -> float:
        """Literal ``tr(A_1 ... A_k)`` as ``sum(X * Y^T)`` over a split ``X Y``."""
        half = len(letters) // 2
        x = self.product(letters[:half])
        right = letters[half:]
        if right not in self._transposes:
            self._transposes[right] = self.product(right).T.tocsr()
        return float(x.multiply(self._transposes[right]).sum())

    def casimir(self) -> np.ndarray:
        jp, jm, jz = (self.operators[c] for c in "+-z")
        return (jm @ jp + jz @ jz + jz).toarray().astype(float)


@lru_cache(maxsize=64)
def kronecker_space(two_s: int, n_particles: int) -> KroneckerSpace:
    return KroneckerSpace(HalfInt(two_s), n_particles)


def casimir_multiplicities(spin, n_particles: int) -> dict[int, int]:
    """``{2j: nu}`` from diagonalizing J^2 on the product space.

    J^2 commutes with Jz, which is diagonal in the product basis, so each
    Jz sector is diagonalized separately. An eigenvalue ``j(j+1)`` seen
    ``(2j+1) nu`` times gives multiplicity ``nu``.
    """
    space = KroneckerSpace(spin, n_particles, cap=729)
    casimir = space.casimir()
    two_m = np.rint(2 * space.operators["z"].diagonal()).astype(int)
    seen: Counter[int] = Counter()
    for sector in np.unique(two_m):
        idx = np.flatnonzero(two_m == sector)
        eig = np.linalg.eigvalsh(casimir[np.ix_(idx, idx)])
        two_j = np.rint(np.sqrt(1.0 + 4.0 * eig) - 1.0).astype(int)
        if np.max(np.abs((two_j * (two_j + 2)) / 4.0 - eig)) > 1e-8:
            raise ArithmeticError("Casimir eigenvalue not of the form j(j+1)")
        seen.update(two_j.tolist())
    result = {}
    for two_j, total in sorted(seen.items()):
        block, rest = divmod(total, two_j + 1)
        if rest:
            raise ArithmeticError(f"eigenvalue count {total} not divisible by 2j+1={two_j + 1}")
        result[two_j] = block
    return result


def uniform_convolution(spin, n_particles: int) -> dict[int, Fraction]:
    """``{2m: P(m)}`` for the sum of N independent uniform z-projections.

    Coefficients of ``(1 + x + ... + x^{2S})^N`` are accumulated by repeated
    integer convolution, then divided by ``(2S+1)^N``.
    """
    spin = as_halfint(spin)
    width = spin.twice + 1
    coeffs = [1]
    for _ in range(n_particles):
        nxt = [0] * (len(coeffs) + width - 1)
        for i, c in enumerate(coeffs):
            if c:
                for k in range(width):
                    nxt[i + k] += c
        coeffs = nxt
    total = width**n_particles
    lowest = -n_particles * spin.twice
    return {lowest + 2 * k: Fraction(c, total) for k, c in enumerate(coeffs)}
