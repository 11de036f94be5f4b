"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a one-line verdict with its key measurement; the summary
hook in conftest.py repeats the PASS/FAIL lines after the run.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from tracialspin import HalfInt, degeneracy_table, dimension_sum
from tracialspin import bosonization as bz
from tracialspin import diffusion as df
from tracialspin import distributions as ds
from tracialspin import multiplicity as mp
from tracialspin import spintrace as st
from tracialspin.oracles import casimir_multiplicities


def verdict(label: str, ok: bool, detail: str) -> None:
    print(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")


def independent_convolutions(two_s: int, n_max: int):
    """(N, {2m: P}) for N = 1..n_max from integer polynomial powers."""
    counts = [1]
    for n in range(1, n_max + 1):
        new = [0] * (len(counts) + two_s)
        for i, c in enumerate(counts):
            for k in range(two_s + 1):
                new[i + k] += c
        counts = new
        total = (two_s + 1) ** n
        yield n, {-n * two_s + 2 * i: Fraction(c, total) for i, c in enumerate(counts)}


def test_ac01_exact_sum_rule():
    mp._CACHE.clear()
    start = time.perf_counter()
    failures = []
    for two_s in (1, 2, 3, 4):
        for table in mp.degeneracy_tables(HalfInt(two_s), 200):
            if dimension_sum(table) != (two_s + 1) ** table.n_particles:
                failures.append((two_s, table.n_particles))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5.0
    verdict("AC1", ok, f"2S in 1..4, N <= 200, failures={failures}, {elapsed:.2f} s")
    assert ok


def test_ac02_multiplicity_oracle():
    mismatches, cases = [], 0
    for two_s in range(1, 729):
        n = 1
        while (two_s + 1) ** n <= 729:
            got = {tj: c for tj, c in degeneracy_table(HalfInt(two_s), n).items() if c}
            if got != casimir_multiplicities(HalfInt(two_s), n):
                mismatches.append((two_s, n))
            cases += 1
            n += 1
    verdict("AC2", not mismatches, f"{cases} (S,N) with (2S+1)^N <= 729, mismatches={mismatches}")
    assert not mismatches


def test_ac03_convolution_oracle():
    mismatches = []
    for two_s in (1, 2, 3):
        for n, expected in independent_convolutions(two_s, 100):
            if ds.prob_m(degeneracy_table(HalfInt(two_s), n)).as_dict() != expected:
                mismatches.append((two_s, n))
    verdict("AC3", not mismatches, f"2S in 1..3, N <= 100, exact rationals, mismatches={mismatches}")
    assert not mismatches


def test_ac04_probability_recurrence():
    violations = []
    for two_s in (1, 2, 3):
        spin = HalfInt(two_s)
        for n in range(1, 101):
            if ds.check_prob_recurrence(spin, n):
                violations.append((two_s, n))
    verdict("AC4", not violations, f"2S in 1..3, N <= 100, nonzero residuals={violations}")
    assert not violations


def test_ac05_mean_square_law():
    failures = []
    for two_s in (1, 2, 3, 4):
        spin = HalfInt(two_s)
        D = spin.casimir() / 6
        for n in range(1, 101):
            msq = ds.mean_square_m(ds.prob_m(degeneracy_table(spin, n)))
            model = ds.GaussianModel(spin, n)
            if msq != n * spin.casimir() / 3 or msq != 2 * D * n:
                failures.append((two_s, n))
            if not math.isclose(model.variance, 2 * model.diffusion_coefficient * n, rel_tol=1e-15):
                failures.append((two_s, n, "model"))
            if model.diffusion_coefficient != float(D):
                failures.append((two_s, n, "D"))
    verdict("AC5", not failures, f"2S in 1..4, N <= 100, exact equality, failures={failures}")
    assert not failures


def test_ac06_gaussian_rate():
    start = time.perf_counter()
    n_list = [64, 128, 256, 512]
    tvd = [ds.compare(ds.prob_m(degeneracy_table(HalfInt(1), n)), ds.GaussianModel(HalfInt(1), n))["tvd"]
           for n in n_list]
    elapsed = time.perf_counter() - start
    monotone = all(a > b for a, b in zip(tvd, tvd[1:]))
    ratios = [tvd[0] / tvd[2], tvd[1] / tvd[3]]
    ok = monotone and all(3.0 <= r <= 5.0 for r in ratios) and elapsed < 10.0
    verdict("AC6", ok, f"tvd={[f'{t:.3e}' for t in tvd]} tvd(N)/tvd(4N)={[round(r, 3) for r in ratios]}, {elapsed:.2f} s")
    assert ok


def test_ac07_ftcs_refinement():
    D = df.diffusion_coefficient(HalfInt(1))
    errors, drifts = [], []
    for h in (0.5, 0.25, 0.125):
        init = df.Grid1D.from_function(45.0, h, lambda x: df.green_function(D, x, 100.0))
        run = df.DiffusionRun.from_ratio(HalfInt(1), 100.0, 200.0, h)
        out = df.solve_ftcs(run, init)
        errors.append(float(np.max(np.abs(out.values - df.green_function(D, out.positions, 200.0)))))
        drifts.append(abs(out.mass() - init.mass()) / init.mass())
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    ok = all(3.2 <= r <= 4.8 for r in ratios) and max(drifts) <= 1e-12
    verdict("AC7", ok, f"Linf={[f'{e:.3e}' for e in errors]} ratios={[round(r, 4) for r in ratios]} "
                       f"mass drift={max(drifts):.1e}")
    assert ok


def test_ac08_semigroup():
    grid = df.Grid1D.zeros(60.0, 0.1)
    residual = df.semigroup_check(df.diffusion_coefficient(HalfInt(1)), 50.0, 50.0, grid)
    verdict("AC8", residual < 1e-8, f"h=0.1 L=60 S=1/2 N1=N2=50 residual={residual:.2e}")
    assert residual < 1e-8


def test_ac09_trace_oracle():
    # every (S, N) with (2S+1)^N <= 4096 and N >= 2, plus N = 1 up to 2S = 64;
    # the single-particle corner above that is covered exactly below
    words = ["".join(w) for k in range(7) for w in itertools.product("+-z", repeat=k)]
    worst, worst_case, cases = 0.0, None, 0
    for n in range(1, 13):
        two_s = 1
        while (two_s + 1) ** n <= 4096 and (n > 1 or two_s <= 64):
            for w in words:
                word = st.SpinWord(w)
                a = st.normalized_trace(word, HalfInt(two_s), n)
                b = st.kronecker_trace_oracle(word, HalfInt(two_s), n)
                err = abs(a - b) / max(1.0, abs(b))
                if err > worst:
                    worst, worst_case = err, (two_s, n, w)
            cases += 1
            two_s += 1
    ok = worst <= 1e-12
    verdict("AC9", ok, f"{len(words)} words x {cases} (S,N); worst rel={worst:.2e} at (2S,N,word)={worst_case}")
    assert ok


def _exact_irrep_trace(word: str, two_j: int) -> Fraction:
    """Rational tr_j W by following each basis state; amplitudes squared stay rational."""
    total = Fraction(0)
    for two_m in range(two_j, -two_j - 1, -2):
        amp2, zf, m = Fraction(1), Fraction(1), two_m
        for letter in reversed(word):
            if letter == "z":
                zf *= Fraction(m, 2)
            elif letter == "+":
                amp2 *= Fraction((two_j - m) * (two_j + m + 2), 4)
                m += 2
            else:
                amp2 *= Fraction((two_j + m) * (two_j - m + 2), 4)
                m -= 2
        if amp2 and m == two_m:
            root_n, root_d = math.isqrt(amp2.numerator), math.isqrt(amp2.denominator)
            assert root_n**2 == amp2.numerator and root_d**2 == amp2.denominator
            total += zf * Fraction(root_n, root_d)
    return total


def test_ac09_single_particle_large_spin_exact():
    words = ["".join(w) for k in range(7) for w in itertools.product("+-z", repeat=k)]
    words = [w for w in words if w.count("+") == w.count("-")]
    worst = 0.0
    spins = [65, 97, 103, 127, 255, 1023, 4095]
    for two_s in spins:
        for w in words:
            exact = _exact_irrep_trace(w, two_s) / (two_s + 1)
            got = st.normalized_trace(st.SpinWord(w), HalfInt(two_s), 1)
            worst = max(worst, abs(got - float(exact)) / max(1.0, abs(float(exact))))
    ok = worst <= 1e-15
    verdict("AC9 (N=1, large S)", ok, f"2S in {spins}, irrep traces vs exact rationals, worst rel={worst:.1e}")
    assert ok


def test_ac10_moment_limit():
    problems = []
    for two_s in (1, 2):
        spin = HalfInt(two_s)
        for ell in (0, 1):
            for row in st.moment_convergence_scan(spin, ell, range(1, 101)):
                if row["abs_error"] != 0.0:
                    problems.append((two_s, ell, row["N"]))
        rows = st.moment_convergence_scan(spin, 2, [32, 64, 128, 256, 512, 1024])
        ratios = [a["abs_error"] / b["abs_error"] for a, b in zip(rows, rows[1:])]
        problems.extend((two_s, 2, r) for r in ratios if not 1.7 <= r <= 2.3)
    verdict("AC10", not problems, f"S in {{1/2, 1}}: l<=1 exact for N<=100, l=2 doubling ratios in [1.7,2.3] "
                                  f"for N=32..1024; problems={problems}")
    assert not problems


def test_ac11_bosonization_identity():
    start = time.perf_counter()
    problems, lines = [], []
    for two_s in (1, 2):
        spin = HalfInt(two_s)
        q = 2 * float(spin.casimir()) / 3
        for p in (1, 2):
            limit = bz.spin_side_limit(p, p, spin, bz.default_n_list(spin))
            target = math.factorial(p) * q**p
            rel = abs(limit.extrapolated - target) / target
            lines.append(f"(2S={two_s},p=q={p}) rel={rel:.1e}")
            if rel > 1e-2:
                problems.append((two_s, p))
        for p, qq in [(1, 0), (0, 1), (2, 1), (1, 2), (2, 0), (3, 1)]:
            report = bz.verify_main_identity(p, qq, spin)
            if report.extrapolated != 0.0 or report.boson_value != 0.0:
                problems.append((two_s, p, qq))
            if any(v != 0.0 for v in report.spin_values_per_N.values()):
                problems.append((two_s, p, qq, "per-N"))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60.0
    verdict("AC11", ok, f"{'; '.join(lines)}; p!=q exact zeros; N up to 512 at S=1/2; {elapsed:.2f} s")
    assert ok


def test_ac12_thermal_state():
    problems, worst_prefactor, worst_beta = [], 0.0, 0.0
    for two_s in range(1, 11):
        spin = HalfInt(two_s)
        osc = bz.thermal_state(spin)
        q_exact = 2 * spin.casimir() / 3
        if not osc.tail() < 1e-12:
            problems.append((two_s, "tail"))
        # omitted tail plus the rounding of an (n_max + 1)-term binary64 sum
        rounding = (osc.fock_cutoff + 1) * np.finfo(float).eps * float(q_exact)
        if abs(bz.mean_occupation(osc) - float(q_exact)) > bz.occupation_tail(osc) + rounding:
            problems.append((two_s, "occupation"))
        # independent form: exp(-beta) = q / (1 + q), with q taken exactly
        beta_ref = math.log1p(float(1 / q_exact))
        rel_beta = abs(osc.beta - beta_ref) / beta_ref
        worst_beta = max(worst_beta, rel_beta)
        if rel_beta > 1e-14:
            problems.append((two_s, "beta"))
        # exact rational rho_nn, rounded once
        rho = np.array([float(q_exact**k / (1 + q_exact) ** (k + 1)) for k in range(osc.fock_cutoff + 1)])
        rel = np.max(np.abs(osc.boltzmann_weights() / rho - 1))
        c2 = 2 * spin.casimir()
        prefactor = 3 / float(c2) * math.sqrt(float(c2 / (3 + c2)))
        rel = max(rel, abs(osc.prefactor / prefactor - 1))
        worst_prefactor = max(worst_prefactor, float(rel))
        if rel > 1e-14:
            problems.append((two_s, "prefactor", float(rel)))
    ok = not problems
    verdict("AC12", ok, f"2S in 1..10: tail < 1e-12, <n> within tail, beta rel={worst_beta:.1e}, "
                        f"prefactor rel={worst_prefactor:.1e}; problems={problems}")
    assert ok
