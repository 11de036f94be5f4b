"""Invariant suite behind ``tracialspin verify``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import bosonization as bz
from . import diffusion as df
from . import distributions as ds
from . import multiplicity as mp
from . import oracles
from . import spintrace as st
from .halfint import HalfInt

__all__ = ["Check", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def _sum_rule(n_max: int, corrupt: bool) -> Check:
    failures = []
    for two_s in (1, 2, 3, 4):
        for table in mp.degeneracy_tables(HalfInt(two_s), n_max):
            if corrupt and two_s == 1 and table.n_particles == n_max:
                table = replace(table, counts=(table.counts[0] + 1, *table.counts[1:]))
            if mp.dimension_sum(table) != table.hilbert_dimension:
                failures.append((two_s, table.n_particles))
    return Check("sum_rule", not failures, f"2S in 1..4, N <= {n_max}; failures={failures[:5]}")


def _casimir_oracle(dim_cap: int) -> Check:
    failures = []
    for two_s in (1, 2, 3, 4):
        n = 1
        while (two_s + 1) ** n <= dim_cap:
            expected = oracles.casimir_multiplicities(HalfInt(two_s), n)
            got = {tj: c for tj, c in mp.degeneracy_table(HalfInt(two_s), n).items() if c}
            if got != expected:
                failures.append((two_s, n))
            n += 1
    return Check("casimir_oracle", not failures, f"(2S+1)^N <= {dim_cap}; failures={failures}")


def _distribution_checks(n_max: int) -> list[Check]:
    conv_fail, rec_fail, msq_fail = [], [], []
    for two_s in (1, 2, 3):
        spin = HalfInt(two_s)
        prev = None
        for table in mp.degeneracy_tables(spin, n_max + 1):
            dist = ds.prob_m(table)
            n = table.n_particles
            if prev is not None and ds.recurrence_violations(prev, dist):
                rec_fail.append((two_s, n - 1))
            prev = dist
            if n > n_max:
                break
            if dist.as_dict() != oracles.uniform_convolution(spin, n):
                conv_fail.append((two_s, n))
            if ds.mean_square_m(dist) != n * spin.casimir() / 3:
                msq_fail.append((two_s, n))
    scope = f"2S in 1..3, N <= {n_max}"
    return [
        Check("convolution_oracle", not conv_fail, f"{scope}; failures={conv_fail}"),
        Check("prob_recurrence", not rec_fail, f"{scope}; failures={rec_fail}"),
        Check("mean_square_law", not msq_fail, f"{scope}; failures={msq_fail}"),
    ]


def _gaussian_rate(n_list) -> Check:
    tvd = [ds.compare(ds.prob_m(mp.degeneracy_table(HalfInt(1), n)), ds.GaussianModel(HalfInt(1), n))["tvd"]
           for n in n_list]
    monotone = all(a > b for a, b in zip(tvd, tvd[1:]))
    ratios = [tvd[k] / tvd[k + 2] for k in range(len(tvd) - 2)]
    ok = monotone and all(3.0 <= r <= 5.0 for r in ratios)
    return Check("gaussian_rate", ok, f"N={list(n_list)} tvd={tvd} tvd(N)/tvd(4N)={ratios}")


def _ftcs(steps) -> Check:
    D = df.diffusion_coefficient(HalfInt(1))
    errors, drifts = [], []
    for h in steps:
        init = df.Grid1D.from_function(45.0, h, lambda x: df.green_function(D, x, 100.0))
        run = df.DiffusionRun.from_ratio(HalfInt(1), 100.0, 200.0, h)
        out = df.solve_ftcs(run, init)
        errors.append(float(np.max(np.abs(out.values - df.green_function(D, out.positions, 200.0)))))
        drifts.append(abs(out.mass() - init.mass()) / init.mass())
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    ok = all(3.2 <= r <= 4.8 for r in ratios) and max(drifts) <= 1e-12
    return Check("ftcs_refinement", ok, f"h={list(steps)} errors={errors} ratios={ratios} mass_drift={max(drifts)}")


def _semigroup() -> Check:
    grid = df.Grid1D.from_function(60.0, 0.1, np.zeros_like)
    residual = df.semigroup_check(df.diffusion_coefficient(HalfInt(1)), 50.0, 50.0, grid)
    return Check("semigroup", residual < 1e-8, f"residual={residual}")


def _trace_oracle(max_len: int, dim_cap: int) -> Check:
    words = ["".join(w) for k in range(max_len + 1) for w in itertools.product("+-z", repeat=k)]
    worst = 0.0
    cases = 0
    for two_s in (1, 2, 3, 4):
        n = 1
        while (two_s + 1) ** n <= dim_cap:
            for w in words:
                word = st.SpinWord(w)
                a = st.normalized_trace(word, HalfInt(two_s), n)
                b = st.kronecker_trace_oracle(word, HalfInt(two_s), n)
                worst = max(worst, abs(a - b) / max(1.0, abs(b)))
            cases += 1
            n += 1
    return Check("trace_oracle", worst <= 1e-12, f"words<= {max_len}, dim<= {dim_cap}, {cases} (S,N); worst={worst}")


def _moments() -> Check:
    problems = []
    for two_s in (1, 2):
        spin = HalfInt(two_s)
        for ell in (0, 1):
            for row in st.moment_convergence_scan(spin, ell, [1, 2, 3, 8, 32]):
                if row["abs_error"] != 0.0:
                    problems.append((two_s, ell, row["N"]))
        rows = st.moment_convergence_scan(spin, 2, [32, 64, 128, 256])
        for a, b in zip(rows, rows[1:]):
            ratio = a["abs_error"] / b["abs_error"]
            if not 1.7 <= ratio <= 2.3:
                problems.append((two_s, 2, a["N"], ratio))
    return Check("moment_limit", not problems, f"problems={problems}")


def _bosonization(quick: bool) -> list[Check]:
    problems = []
    for two_s in (1, 2):
        spin = HalfInt(two_s)
        n_list = [16, 32, 64, 128] if quick else bz.default_n_list(spin)
        for p, q in [(1, 1), (2, 2)]:
            report = bz.verify_main_identity(p, q, spin, n_list)
            target = math.factorial(p) * (2 * float(spin.casimir()) / 3) ** p
            if abs(report.extrapolated - target) > 1e-2 * target or not report.passed:
                problems.append((two_s, p, q, report.extrapolated))
        for p, q in [(1, 0), (2, 1), (0, 2)]:
            report = bz.verify_main_identity(p, q, spin, n_list)
            if report.extrapolated != 0.0 or report.boson_value != 0.0:
                problems.append((two_s, p, q))
    identity = Check("boson_identity", not problems, f"problems={problems}")

    thermal_problems = []
    for two_s in (1, 2, 3, 4):
        spin = HalfInt(two_s)
        osc = bz.thermal_state(spin)
        q_exact = 2 * spin.casimir() / 3
        if osc.tail() >= 1e-12:
            thermal_problems.append((two_s, "tail"))
        rounding = (osc.fock_cutoff + 1) * np.finfo(float).eps * float(q_exact)
        if abs(bz.mean_occupation(osc) - float(q_exact)) > bz.occupation_tail(osc) + rounding:
            thermal_problems.append((two_s, "occupation"))
        # exp(-beta) = q / (1 + q), so beta = log1p(1/q) with q taken exactly
        beta = math.log1p(float(1 / q_exact))
        if abs(osc.beta - beta) > 1e-14 * beta:
            thermal_problems.append((two_s, "beta"))
        rel = np.max(np.abs(osc.boltzmann_weights() / osc.weights() - 1.0))
        if rel > 1e-14:
            thermal_problems.append((two_s, "prefactor", float(rel)))
    thermal = Check("thermal_state", not thermal_problems, f"problems={thermal_problems}")
    return [identity, thermal]


def run_suite(quick: bool = False, corrupt: bool = False) -> list[Check]:
    """Run every invariant at desk scale; ``quick`` shrinks the sweeps.

    ``corrupt`` damages one degeneracy table before the sum-rule check, so
    callers can confirm that a failure is reported.
    """
    checks = [
        _sum_rule(50 if quick else 200, corrupt),
        _casimir_oracle(243 if quick else 729),
        *_distribution_checks(30 if quick else 100),
        _gaussian_rate([64, 128, 256, 512]),
        _ftcs([0.5, 0.25] if quick else [0.5, 0.25, 0.125]),
        _semigroup(),
        _trace_oracle(4 if quick else 6, 256 if quick else 4096),
        _moments(),
        *_bosonization(quick),
    ]
    return checks
