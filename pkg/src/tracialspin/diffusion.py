"""Continuum limit: particle number as time, z-projection as position.

The lattice law evolves under a one-dimensional drift-free diffusion

    dP/dN = D d^2P/dm^2,   D = S(S+1)/6,

whose point-source solution is the heat kernel (4 pi D N)^{-1/2}
exp(-m^2 / (4 D N)). This module provides that kernel, an m-convolution
check of its semigroup property, an explicit FTCS solver with zero-flux
walls, and residual checks tying the exact lattice step to the continuum
second derivative.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import prob_m
from .halfint import HalfInt, as_halfint
from .multiplicity import degeneracy_table

__all__ = [
    "DiffusionRun",
    "Grid1D",
    "StabilityError",
    "diffusion_coefficient",
    "discrete_laplacian",
    "discrete_laplacian_residual",
    "green_function",
    "kernel_convolution",
    "lattice_pde_comparison",
    "semigroup_check",
    "slice_metadata",
    "slice_to_csv",
    "solve_ftcs",
]


class StabilityError(ValueError):
    """Explicit scheme requested with D dN / h^2 above 1/2."""

    def __init__(self, ratio: float):
        self.ratio = ratio
        super().__init__(f"FTCS unstable: r = D*dN/h^2 = {ratio:.6g} exceeds 1/2")


def diffusion_coefficient(spin) -> float:
    return float(as_halfint(spin).casimir()) / 6.0


def green_function(D: float, m, N: float):
    if not N > 0:
        raise ValueError(f"pseudo-time N must be positive, got {N}")
    if not D > 0:
        raise ValueError(f"diffusion coefficient must be positive, got {D}")
    m = np.asarray(m, dtype=float)
    return np.exp(-(m * m) / (4.0 * D * N)) / math.sqrt(4.0 * math.pi * D * N)


@dataclass(frozen=True)
class Grid1D:
    """Values on ``2K+1`` nodes ``-L, -L+h, ..., L``."""

    half_width: float
    step: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        k = round(self.half_width / self.step)
        if k < 1 or abs(k * self.step - self.half_width) > 1e-9 * max(1.0, self.half_width):
            raise ValueError(
                f"half-width {self.half_width} is not a positive multiple of step {self.step}"
            )
        values = np.array(self.values, dtype=float)
        if values.shape != (2 * k + 1,):
            raise ValueError(f"expected {2 * k + 1} values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, half_width: float, step: float, func) -> "Grid1D":
        k = round(half_width / step)
        return cls(half_width, step, func(step * np.arange(-k, k + 1)))

    @classmethod
    def zeros(cls, half_width: float, step: float) -> "Grid1D":
        return cls.from_function(half_width, step, np.zeros_like)

    @property
    def n_nodes(self) -> int:
        return self.values.size

    @property
    def positions(self) -> np.ndarray:
        k = (self.n_nodes - 1) // 2
        return self.step * np.arange(-k, k + 1)

    def mass(self) -> float:
        return float(self.values.sum() * self.step)

    def with_values(self, values) -> "Grid1D":
        return replace(self, values=values)


@dataclass(frozen=True)
class DiffusionRun:
    spin: HalfInt
    n_start: float
    n_end: float
    dN: float
    step: float

    def __post_init__(self):
        object.__setattr__(self, "spin", as_halfint(self.spin))
        if not self.n_end >= self.n_start:
            raise ValueError("n_end must not precede n_start")
        if not self.dN > 0:
            raise ValueError("dN must be positive")
        if self.stability_ratio > 0.5:
            raise StabilityError(self.stability_ratio)
        n = (self.n_end - self.n_start) / self.dN
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError(f"(n_end - n_start) / dN = {n} is not an integer step count")

    @classmethod
    def from_ratio(cls, spin, n_start: float, n_end: float, step: float, ratio: float = 0.25):
        """Largest uniform dN giving at most ``ratio`` and an integer step count."""
        D = diffusion_coefficient(spin)
        span = n_end - n_start
        n_steps = max(1, math.ceil(span * D / (ratio * step * step) - 1e-12))
        return cls(spin, n_start, n_end, span / n_steps, step)

    @property
    def D(self) -> float:
        return diffusion_coefficient(self.spin)

    @property
    def stability_ratio(self) -> float:
        return self.D * self.dN / (self.step * self.step)

    @property
    def n_steps(self) -> int:
        return round((self.n_end - self.n_start) / self.dN)


def solve_ftcs(run: DiffusionRun, initial: Grid1D) -> Grid1D:
    """March ``initial`` from ``run.n_start`` to ``run.n_end``.

    Fluxes across the outer faces are zero, so the plain sum of the values
    is conserved step by step.
    """
    if abs(initial.step - run.step) > 1e-12 * run.step:
        raise ValueError(f"grid step {initial.step} differs from run step {run.step}")
    r = run.stability_ratio
    p = initial.values.copy()
    for _ in range(run.n_steps):
        flux = np.diff(p)
        update = np.zeros_like(p)
        update[:-1] += flux
        update[1:] -= flux
        p = p + r * update
    return initial.with_values(p)


def kernel_convolution(D: float, n1: float, n2: float, grid: Grid1D) -> np.ndarray:
    """Trapezoidal ``int G(m - m', n1) G(m', n2) dm'`` at every grid node.

    The arguments are put in a canonical order first: the convolution is
    symmetric in (n1, n2) and this makes the computed values symmetric too.
    """
    n1, n2 = sorted((n1, n2))
    x = grid.positions
    weights = np.full(x.size, grid.step)
    weights[[0, -1]] *= 0.5
    inner = green_function(D, x, n2) * weights
    kernel = green_function(D, x[:, None] - x[None, :], n1)
    return kernel @ inner


def semigroup_check(D: float, n1: float, n2: float, grid: Grid1D) -> float:
    """Max deviation of ``G(n1) * G(n2)`` from ``G(n1 + n2)`` on the grid."""
    if not (n1 > 0 and n2 > 0):
        raise ValueError("both pseudo-times must be positive")
    conv = kernel_convolution(D, n1, n2, grid)
    return float(np.max(np.abs(conv - green_function(D, grid.positions, n1 + n2))))


def discrete_laplacian(values: np.ndarray, offset: int) -> np.ndarray:
    """``(f[i+k] + f[i-k] - 2 f[i]) / (k h)^2`` with h = 1 and zero outside."""
    pad = np.pad(np.asarray(values, dtype=float), offset)
    n = len(values)
    return (pad[2 * offset:2 * offset + n] + pad[:n] - 2.0 * pad[offset:offset + n]) / offset**2


def _midpoints(values: np.ndarray) -> np.ndarray:
    """Four-point cubic interpolation to the points halfway between nodes.

    Entry ``i`` sits between ``values[i-1]`` and ``values[i]``; the output
    has one more entry than the input, zeros assumed outside.
    """
    f = np.pad(values, 2)
    return (-f[:-3] + 9.0 * f[1:-2] + 9.0 * f[2:-1] - f[3:]) / 16.0


def _second_derivative(values: np.ndarray) -> np.ndarray:
    """Fourth-order central second derivative, unit spacing, zero padding."""
    f = np.pad(values, 2)
    return (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / 12.0


def discrete_laplacian_residual(spin, n_particles: int) -> dict[str, np.ndarray]:
    """Exact one-particle increment against its continuum replacement.

    On the grid of N+1 particles, compares

        lhs(m)       = (2S+1) [P(m, N+1) - P(m, N)],
        pair_sum(m)  = sum_{tau > 0} tau^2 Lap_tau P(m, N),
        continuum(m) = (sum_{tau > 0} tau^2) d^2P/dm^2 (m, N),

    where ``Lap_tau`` is the symmetric second difference of span tau.
    ``lhs`` and ``pair_sum`` agree identically (pairing +tau with -tau in the
    exact recurrence); ``residual = lhs - continuum`` measures the
    mean-value replacement of each ``Lap_tau`` by the second derivative.

    For half-integer S the two particle numbers live on interleaved grids,
    so P(., N) and its second derivative are carried to the N+1 grid by
    four-point cubic interpolation; integer S needs no interpolation.
    """
    spin = as_halfint(spin)
    if n_particles < 2:
        raise ValueError("need N >= 2")
    two_s = spin.twice
    cur = prob_m(degeneracy_table(spin, n_particles))
    nxt = prob_m(degeneracy_table(spin, n_particles + 1))
    p_cur = cur.as_float()
    p_nxt = nxt.as_float()
    d2 = _second_derivative(p_cur)
    if spin.is_integer:
        # N+1 grid is the N grid widened by S on each side
        pc = np.pad(p_cur, spin.twice // 2)
        d2c = np.pad(d2, spin.twice // 2)
        pair_sum = sum(
            (tau * tau) * discrete_laplacian(pc, tau) for tau in range(1, two_s // 2 + 1)
        )
    else:
        # N+1 grid: midpoints of the N grid, extended by (2S-1)/2 nodes per side
        ext = (two_s - 1) // 2
        pc = np.pad(_midpoints(p_cur), ext)
        d2c = np.pad(_midpoints(d2), ext)
        # m -/+ tau of an N+1 node are N-grid nodes; offsets in N-grid indices
        pad = two_s + 1
        base = np.pad(p_cur, pad)
        i = np.arange(pc.size)
        pair_sum = np.zeros_like(pc)
        for two_tau in range(1, two_s + 1, 2):
            left = base[pad + i - (two_s + two_tau) // 2]
            right = base[pad + i - (two_s - two_tau) // 2]
            pair_sum += left + right - 2.0 * pc
    tau_sq_sum = sum((t / 2.0) ** 2 for t in range(two_s % 2 or 2, two_s + 1, 2))
    lhs = (two_s + 1) * (p_nxt - pc)
    continuum = tau_sq_sum * d2c
    return {
        "two_m": np.asarray(nxt.support),
        "lhs": lhs,
        "pair_sum": pair_sum,
        "continuum": continuum,
        "residual": lhs - continuum,
    }


def lattice_pde_comparison(spin, n_start: int, n_end: int, dN: float = 1.0) -> dict[str, float]:
    """Evolve the exact slice at ``n_start`` by FTCS (h = 1) and compare at ``n_end``.

    Needs an integer m-grid at ``n_start``. Reports the PDE-vs-exact error
    alongside the Gaussian-vs-exact errors at both ends, which bound the
    continuum approximation budget.
    """
    spin = as_halfint(spin)
    if (n_start * spin.twice) % 2 or (n_end * spin.twice) % 2:
        raise ValueError("lattice initial data needs integer m at both ends")
    sigma_end = math.sqrt(n_end * float(spin.casimir()) / 3.0)
    half_width = float(max(n_end * spin.twice // 2, math.ceil(6 * sigma_end)))
    start = prob_m(degeneracy_table(spin, n_start))
    end = prob_m(degeneracy_table(spin, n_end))

    def on_grid(dist):
        def build(x):
            out = np.zeros_like(x)
            idx = np.rint(dist.positions() + half_width).astype(int)
            keep = (idx >= 0) & (idx < x.size)
            out[idx[keep]] = dist.as_float()[keep]
            return out
        return Grid1D.from_function(half_width, 1.0, build)

    initial = on_grid(start)
    target = on_grid(end)
    run = DiffusionRun(spin, float(n_start), float(n_end), dN, 1.0)
    final = solve_ftcs(run, initial)
    D = run.D
    x = initial.positions
    return {
        "pde_vs_exact": float(np.max(np.abs(final.values - target.values))),
        "gaussian_vs_exact_start": float(np.max(np.abs(green_function(D, x, n_start) - initial.values))),
        "gaussian_vs_exact_end": float(np.max(np.abs(green_function(D, x, n_end) - target.values))),
        "mass_drift": abs(final.mass() - initial.mass()),
        "stability_ratio": run.stability_ratio,
    }


def slice_to_csv(grid: Grid1D) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["two_m_or_position", "value"])
    for x, v in zip(grid.positions, grid.values):
        writer.writerow([repr(float(x)), repr(float(v))])
    return out.getvalue()


def slice_metadata(run: DiffusionRun, n_value: float) -> str:
    meta = {
        "S": str(run.spin),
        "D": run.D,
        "N": n_value,
        "h": run.step,
        "dN": run.dN,
        "r": run.stability_ratio,
    }
    return json.dumps(meta, sort_keys=True, indent=2) + "\n"
