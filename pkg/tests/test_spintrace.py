import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs
from scipy.integrate import quad

from tracialspin import HalfInt, degeneracy_table
from tracialspin import spintrace as st


def dense_collective(two_s: int, n: int):
    """Collective J+, J-, Jz by explicit dense Kronecker sums."""
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    jp = np.zeros((two_s + 1, two_s + 1))
    for k in range(1, two_s + 1):
        jp[k - 1, k] = math.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    single = {"+": jp, "-": jp.T, "z": np.diag(m)}
    eye = np.eye(two_s + 1)
    out = {}
    for letter, op in single.items():
        total = np.zeros(((two_s + 1) ** n,) * 2)
        for site in range(n):
            factors = [op if k == site else eye for k in range(n)]
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            total += term
        out[letter] = total
    return out


def dense_trace(word: str, two_s: int, n: int) -> float:
    ops = dense_collective(two_s, n)
    acc = np.eye((two_s + 1) ** n)
    for letter in word:
        acc = acc @ ops[letter]
    return float(np.trace(acc)) / acc.shape[0]


class TestIrrepMatrices:
    def test_spin_half(self):
        mats = st.irrep_matrices(Fraction(1, 2))
        np.testing.assert_array_equal(mats.z, np.diag([0.5, -0.5]))
        np.testing.assert_array_equal(mats.raising, [[0.0, 1.0], [0.0, 0.0]])

    def test_spin_one(self):
        mats = st.irrep_matrices(1)
        assert mats.raising[0, 1] == pytest.approx(math.sqrt(2), rel=1e-15)
        assert mats.raising[1, 2] == pytest.approx(math.sqrt(2), rel=1e-15)
        assert np.count_nonzero(mats.raising) == 2

    @pytest.mark.parametrize("two_j", range(0, 9))
    def test_algebra(self, two_j):
        mats = st.irrep_matrices(HalfInt(two_j))
        comm = mats.raising @ mats.lowering - mats.lowering @ mats.raising
        np.testing.assert_allclose(comm, 2 * mats.z, atol=1e-13)
        np.testing.assert_array_equal(mats.lowering, mats.raising.T)
        jj = two_j / 2 * (two_j / 2 + 1)
        np.testing.assert_allclose(mats.casimir(), jj * np.eye(two_j + 1), atol=1e-13)


class TestNormalizedTrace:
    def test_zz_three_half_spins(self):
        assert st.normalized_trace(st.SpinWord("zz"), HalfInt(1), 3) == pytest.approx(0.75, rel=1e-14)

    def test_odd_words_vanish(self):
        for two_s, n in [(1, 3), (2, 5), (3, 4)]:
            assert st.normalized_trace(st.SpinWord("z"), HalfInt(two_s), n) == pytest.approx(0.0, abs=1e-14)
            assert st.normalized_trace(st.SpinWord("+"), HalfInt(two_s), n) == 0.0
            assert st.normalized_trace(st.SpinWord("+z+-"), HalfInt(two_s), n) == 0.0

    def test_raise_lower_two_half_spins(self):
        assert st.normalized_trace(st.SpinWord("+-"), HalfInt(1), 2) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("two_s,n", [(1, 4), (2, 3), (3, 2)])
    def test_against_dense_kronecker(self, two_s, n):
        for word in ["", "zz", "+-", "-+", "z+-z", "+z-", "++--", "+-+-", "zzzz", "-z+z"]:
            ref = dense_trace(word, two_s, n)
            assert st.normalized_trace(st.SpinWord(word), HalfInt(two_s), n) == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_against_sparse_oracle_zzzz(self):
        for n in range(2, 6):
            word = st.SpinWord("zzzz")
            a = st.normalized_trace(word, HalfInt(1), n)
            b = st.kronecker_trace_oracle(word, HalfInt(1), n)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b))

    def test_identity_and_scaling(self):
        assert st.kronecker_trace_oracle(st.SpinWord(""), HalfInt(2), 3) == pytest.approx(1.0, rel=1e-15)
        assert st.kronecker_trace_oracle(st.SpinWord("+"), HalfInt(2), 3) == 0.0
        scaled = st.normalized_trace(st.SpinWord("zz", coefficient=2.0, scaled=True), HalfInt(1), 8)
        assert scaled == pytest.approx(2.0 * 0.25, rel=1e-14)

    def test_oracle_caps_dimension(self):
        with pytest.raises(ValueError):
            st.kronecker_trace_oracle(st.SpinWord("zz"), HalfInt(1), 13)

    @pytest.mark.parametrize("two_s,n", [(1, 30), (2, 17), (3, 9), (4, 6)])
    def test_casimir_trace(self, two_s, n):
        spin = HalfInt(two_s)
        total = sum(st.normalized_trace(st.SpinWord(w), spin, n) for w in ("-+", "zz", "z"))
        assert total == pytest.approx(n * float(spin.casimir()), rel=1e-12)

    def test_per_irrep_cross_check(self):
        table = degeneracy_table(HalfInt(1), 6)
        word = st.SpinWord("+-zz")
        per_irrep = st.irrep_trace_table(word, table)
        weighted = sum(c * per_irrep[tj] for tj, c in table.items()) / table.hilbert_dimension
        assert weighted == pytest.approx(st.normalized_trace(word, HalfInt(1), 6), rel=1e-13)

    def test_rejects_unknown_letters(self):
        with pytest.raises(ValueError):
            st.SpinWord("x+")


class TestMoments:
    def test_asymptotic_values(self):
        assert st.asymptotic_moment_exact(HalfInt(1), 1) == Fraction(1, 4)
        assert st.asymptotic_moment_exact(HalfInt(3), 0) == 1
        assert st.asymptotic_moment_exact(HalfInt(2), 2) == Fraction(4, 3)

    def test_second_moment_exact_at_every_n(self):
        for n in (1, 2, 3, 4, 5, 50):
            assert st.z_moment_exact(HalfInt(1), n, 2) == Fraction(1, 4)

    def test_scan_exact_rows(self):
        for ell in (0, 1):
            rows = st.moment_convergence_scan(HalfInt(1), ell, [1, 2, 5, 40])
            assert all(r["abs_error"] == 0.0 for r in rows)

    def test_scan_quartic_rate(self):
        for two_s in (1, 2):
            rows = st.moment_convergence_scan(HalfInt(two_s), 2, [32, 64, 128, 256])
            for a, b in zip(rows, rows[1:]):
                assert 1.7 <= a["abs_error"] / b["abs_error"] <= 2.3
        # spin-1/2 quartic cumulant gives the exact 1/N remainder -1/(8N)
        rows = st.moment_convergence_scan(HalfInt(1), 2, [32])
        assert rows[0]["abs_error"] == pytest.approx(1 / (8 * 32), rel=1e-14)

    def test_scan_rejects_unsorted(self):
        with pytest.raises(ValueError):
            st.moment_convergence_scan(HalfInt(1), 2, [64, 32])

    def test_scan_json_schema(self):
        import json
        rows = json.loads(st.scan_to_json(st.moment_convergence_scan(HalfInt(1), 1, [4])))
        assert set(rows[0]) == {"word", "S", "N", "value", "reference_value", "abs_error"}


class TestCharacteristicFunction:
    def test_values(self):
        assert st.char_function(HalfInt(3), 0.0) == 1.0
        assert st.char_function(HalfInt(1), 1.0) == pytest.approx(math.exp(-0.125), rel=1e-15)
        assert st.char_function(HalfInt(1), 1.0) == pytest.approx(0.882497, abs=1e-6)

    @pytest.mark.parametrize("two_s", [1, 2, 3])
    def test_series_moments(self, two_s):
        numeric = st.char_function_moments(HalfInt(two_s), 4)
        for ell in range(5):
            assert numeric[ell] == pytest.approx(st.asymptotic_moment(HalfInt(two_s), ell), rel=1e-10)

    def test_inversion_centre(self):
        res = st.invert_char_function(HalfInt(1), 0.0)
        assert res.value == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)
        assert res.truncation_bound < 1e-15

    def test_inversion_even_and_normalized(self):
        spin = HalfInt(2)
        for m in (0.3, 1.7, 4.0):
            assert st.invert_char_function(spin, m).value == pytest.approx(
                st.invert_char_function(spin, -m).value, rel=1e-14)
        mass = quad(lambda m: st.invert_char_function(spin, m).value, -12, 12, limit=200)[0]
        assert mass == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(two_s=hs.integers(1, 3), n=hs.integers(1, 5),
       word=hs.text(alphabet="+-z", max_size=6))
def test_trace_matches_oracle(two_s, n, word):
    if (two_s + 1) ** n > 1024:
        n = 1
    w = st.SpinWord(word)
    a = st.normalized_trace(w, HalfInt(two_s), n)
    b = st.kronecker_trace_oracle(w, HalfInt(two_s), n)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(b))
    if w.grading:
        assert a == 0.0
