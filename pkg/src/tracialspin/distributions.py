"""Probability laws of total spin under the fully mixed state.

With every state of N spin-S particles equally likely,

    P(j, N) = (2j+1) nu(j, N; S) / (2S+1)^N,
    P(m, N) = sum_{j >= |m|} nu(j, N; S) / (2S+1)^N.

Both are held exactly as integer weights over the common denominator
``(2S+1)^N``. The Gaussian continuum law has variance ``N S(S+1)/3``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .halfint import HalfInt, as_halfint
from .multiplicity import DegeneracyTable, degeneracy_table

__all__ = [
    "EXACT_EXPORT_THRESHOLD",
    "GaussianModel",
    "LatticeDistribution",
    "VariableKind",
    "check_prob_recurrence",
    "compare",
    "distribution_to_csv",
    "gaussian_pj",
    "gaussian_pm",
    "joint_pm3",
    "mean_casimir",
    "mean_square_m",
    "prob_j",
    "prob_m",
    "recurrence_violations",
]

EXACT_EXPORT_THRESHOLD = 512


class VariableKind(str, enum.Enum):
    TOTAL_J = "total_j"
    Z_PROJECTION_M = "z_projection_m"


@dataclass(frozen=True)
class LatticeDistribution:
    """Probability mass ``weights[k] / denominator`` at twice-value ``support[k]``."""

    kind: VariableKind
    spin: HalfInt
    n_particles: int
    support: tuple[int, ...]
    weights: tuple[int, ...]
    denominator: int

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.denominator) for w in self.weights)

    def mass(self, two_x: int) -> Fraction:
        if not self.support:
            return Fraction(0)
        lo, hi = self.support[0], self.support[-1]
        if two_x < lo or two_x > hi or (two_x - lo) % 2:
            return Fraction(0)
        return Fraction(self.weights[(two_x - lo) // 2], self.denominator)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.masses))

    def positions(self) -> np.ndarray:
        return np.asarray(self.support, dtype=float) / 2.0

    def as_float(self) -> np.ndarray:
        # int / int is correctly rounded in Python even for huge operands
        return np.array([w / self.denominator for w in self.weights])

    def total(self) -> Fraction:
        return Fraction(sum(self.weights), self.denominator)


def prob_j(table: DegeneracyTable) -> LatticeDistribution:
    weights = tuple((two_j + 1) * c for two_j, c in table.items())
    return LatticeDistribution(
        VariableKind.TOTAL_J,
        table.spin,
        table.n_particles,
        tuple(table.two_js),
        weights,
        table.hilbert_dimension,
    )


def prob_m(table: DegeneracyTable) -> LatticeDistribution:
    # suffix sums over j >= |m|; j and m share parity, so index by |2m|
    suffix = []
    running = 0
    for c in reversed(table.counts):
        running += c
        suffix.append(running)
    suffix.reverse()
    two_max = table.two_j_max
    support = tuple(range(-two_max, two_max + 1, 2))
    weights = tuple(suffix[(abs(tm) - table.two_j_min) // 2] for tm in support)
    return LatticeDistribution(
        VariableKind.Z_PROJECTION_M,
        table.spin,
        table.n_particles,
        support,
        weights,
        table.hilbert_dimension,
    )


def recurrence_violations(
    current: LatticeDistribution, following: LatticeDistribution
) -> list[tuple[int, Fraction, Fraction]]:
    """Points where ``(2S+1) P(m, N+1) != sum_tau P(m - tau, N)`` exactly.

    Returns ``(2m, lhs, rhs)`` triples over the union of both supports widened
    by S, so a mass leaking outside either grid is also caught.
    """
    two_s = current.spin.twice
    hi = max(current.support[-1], following.support[-1]) + two_s
    hi += (hi - following.support[0]) % 2
    two_ms = range(-hi, hi + 1, 2)
    violations = []
    for tm in two_ms:
        lhs = (two_s + 1) * following.mass(tm)
        rhs = sum((current.mass(tm - tt) for tt in range(-two_s, two_s + 1, 2)), Fraction(0))
        if lhs != rhs:
            violations.append((tm, lhs, rhs))
    return violations


def check_prob_recurrence(spin, n_particles: int) -> list[tuple[int, Fraction, Fraction]]:
    """Exact residual report of the one-particle probability recurrence at N."""
    spin = as_halfint(spin)
    current = prob_m(degeneracy_table(spin, n_particles))
    following = prob_m(degeneracy_table(spin, n_particles + 1))
    return recurrence_violations(current, following)


def mean_square_m(dist: LatticeDistribution) -> Fraction:
    if dist.kind is not VariableKind.Z_PROJECTION_M:
        raise ValueError("mean_square_m needs a z-projection distribution")
    total = sum(tm * tm * w for tm, w in zip(dist.support, dist.weights))
    return Fraction(total, 4 * dist.denominator)


def mean_casimir(dist: LatticeDistribution) -> Fraction:
    """Expectation of ``j(j+1)`` under ``P(j, N)``."""
    if dist.kind is not VariableKind.TOTAL_J:
        raise ValueError("mean_casimir needs a total-j distribution")
    total = sum(tj * (tj + 2) * w for tj, w in zip(dist.support, dist.weights))
    return Fraction(total, 4 * dist.denominator)


@dataclass(frozen=True)
class GaussianModel:
    spin: HalfInt
    n_particles: float

    def __post_init__(self):
        object.__setattr__(self, "spin", as_halfint(self.spin))
        if not self.n_particles > 0:
            raise ValueError(f"n_particles must be positive, got {self.n_particles}")

    @property
    def spin_casimir(self) -> float:
        return float(self.spin.casimir())

    @property
    def diffusion_coefficient(self) -> float:
        return self.spin_casimir / 6.0

    @property
    def variance(self) -> float:
        return self.n_particles * self.spin_casimir / 3.0


def gaussian_pm(model: GaussianModel, m):
    var = model.variance
    m = np.asarray(m, dtype=float)
    return np.sqrt(1.0 / (2.0 * math.pi * var)) * np.exp(-(m * m) / (2.0 * var))


def joint_pm3(model: GaussianModel, m1, m2, m3):
    return gaussian_pm(model, m1) * gaussian_pm(model, m2) * gaussian_pm(model, m3)


def gaussian_pj(model: GaussianModel, j):
    """Radial law ``4 pi j^2`` times the isotropic three-component density."""
    j = np.asarray(j, dtype=float)
    if np.any(j < 0):
        raise ValueError("j must be non-negative")
    var = model.variance
    return 4.0 * math.pi * j * j * (2.0 * math.pi * var) ** -1.5 * np.exp(-(j * j) / (2.0 * var))


def compare(exact: LatticeDistribution, model: GaussianModel) -> dict[str, float]:
    """Distances between a lattice law and the Gaussian sampled at unit spacing.

    ``tvd`` and ``max_abs`` use the raw density values; ``kl`` is
    KL(exact || gaussian) with the Gaussian renormalized over the lattice.
    """
    if model.spin != exact.spin or float(model.n_particles) != float(exact.n_particles):
        raise ValueError(
            f"mismatched parameters: lattice (S={exact.spin}, N={exact.n_particles}), "
            f"model (S={model.spin}, N={model.n_particles})"
        )
    x = exact.positions()
    p = exact.as_float()
    if exact.kind is VariableKind.Z_PROJECTION_M:
        q = gaussian_pm(model, x)
    else:
        q = gaussian_pj(model, x)
    q_norm = q / q.sum()
    nz = p > 0
    kl = float(np.sum(p[nz] * (np.log(p[nz]) - np.log(q_norm[nz]))))
    return {
        "tvd": float(0.5 * np.sum(np.abs(p - q))),
        "max_abs": float(np.max(np.abs(p - q))),
        "kl": kl,
    }


def _format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def distribution_to_csv(
    dist: LatticeDistribution,
    exact: bool | None = None,
    threshold: int = EXACT_EXPORT_THRESHOLD,
    extra_columns: dict[str, np.ndarray] | None = None,
) -> str:
    """CSV with ``two_m,probability`` or ``two_j,probability``.

    ``exact=None`` writes ``p/q`` rationals up to N = ``threshold`` and
    binary64 decimals beyond; ``True``/``False`` force either format.
    """
    use_exact = dist.n_particles <= threshold if exact is None else exact
    extra_columns = extra_columns or {}
    key = "two_m" if dist.kind is VariableKind.Z_PROJECTION_M else "two_j"
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([key, "probability", *extra_columns])
    floats = None if use_exact else dist.as_float()
    for k, tx in enumerate(dist.support):
        if use_exact:
            prob = _format_fraction(Fraction(dist.weights[k], dist.denominator))
        else:
            prob = repr(float(floats[k]))
        writer.writerow([tx, prob, *(repr(float(col[k])) for col in extra_columns.values())])
    return out.getvalue()
