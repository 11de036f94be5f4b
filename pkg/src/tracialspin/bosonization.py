"""Mapping scaled collective ladder operators onto a thermal oscillator.

In the N -> infinity limit, ``J+/sqrt(N)`` and ``J-/sqrt(N)`` behave like
the complex amplitude ``z*, z`` of a centred complex Gaussian with
``E|z|^2 = q = 2S(S+1)/3``. Read as a Glauber P-function this is the
thermal state

    rho_nn = q^n / (1+q)^{n+1},   beta hbar omega = ln((3 + 2S(S+1)) / (2S(S+1))),

so normal-ordered spin moments become ``tr(rho a^dag^p a^p) = p! q^p``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

from .halfint import HalfInt, as_halfint
from .spintrace import SpinWord, normalized_trace

__all__ = [
    "DEFAULT_TAIL",
    "NormalOrderedPolynomial",
    "ThermalOscillator",
    "SpinLimit",
    "VerificationReport",
    "boson_normal_trace",
    "closed_form_moment",
    "default_n_list",
    "mean_occupation",
    "normal_order",
    "occupation_tail",
    "p_representation_quadrature",
    "report_to_json",
    "richardson_inverse_n",
    "spin_side_limit",
    "thermal_state",
    "verify_conjecture",
    "verify_main_identity",
]

DEFAULT_TAIL = 1e-12


def _casimir(spin: HalfInt) -> float:
    return float(spin.casimir())


@dataclass(frozen=True)
class ThermalOscillator:
    spin: HalfInt
    mean_occupation: float
    beta: float
    fock_cutoff: int

    @property
    def ratio(self) -> float:
        """Boltzmann factor ``exp(-beta) = q / (1 + q)``."""
        q = self.mean_occupation
        return q / (1.0 + q)

    @property
    def prefactor(self) -> float:
        """``[3 / (2S(S+1))] sqrt(2S(S+1) / (3 + 2S(S+1)))``."""
        return float(self._extended()[2])

    def _extended(self):
        """(q, beta, C) in extended precision from the exact Casimir.

        Weights run to n ~ 400 for larger S, where raising a binary64 q or
        beta to the n-th power would already cost n ulps.
        """
        c = 2 * self.spin.casimir()
        two_c = np.longdouble(c.numerator) / np.longdouble(c.denominator)
        q = two_c / 3
        beta = np.log1p(3 / two_c)
        prefactor = 3 / two_c * np.sqrt(two_c / (3 + two_c))
        return q, beta, prefactor

    def weights(self) -> np.ndarray:
        """``rho_nn = q^n / (1 + q)^{n+1}`` for ``n = 0 .. fock_cutoff``."""
        q, _, _ = self._extended()
        n = np.arange(self.fock_cutoff + 1, dtype=np.longdouble)
        return ((q / (1 + q)) ** n / (1 + q)).astype(float)

    def boltzmann_weights(self) -> np.ndarray:
        """``C(S) exp(-beta (n + 1/2))``; must coincide with :meth:`weights`."""
        _, beta, prefactor = self._extended()
        n = np.arange(self.fock_cutoff + 1, dtype=np.longdouble)
        return (prefactor * np.exp(-beta * (n + 0.5))).astype(float)

    def tail(self) -> float:
        """Weight beyond the cutoff, ``sum_{n > n_max} rho_nn``."""
        return self.ratio ** (self.fock_cutoff + 1)


def thermal_state(spin, tail_tolerance: float = DEFAULT_TAIL) -> ThermalOscillator:
    spin = as_halfint(spin)
    if spin.twice < 1:
        raise ValueError("spin must be positive")
    if not 0 < tail_tolerance < 1:
        raise ValueError("tail tolerance must lie in (0, 1)")
    two_c = 2.0 * _casimir(spin)
    q = two_c / 3.0
    beta = math.log((3.0 + two_c) / two_c)
    cutoff = math.ceil(math.log(tail_tolerance) / math.log(q / (1.0 + q)))
    return ThermalOscillator(spin, q, beta, cutoff)


def mean_occupation(osc: ThermalOscillator) -> float:
    n = np.arange(osc.fock_cutoff + 1)
    return float(np.dot(n, osc.weights()))


def occupation_tail(osc: ThermalOscillator) -> float:
    """``sum_{n > n_max} n rho_nn`` in closed form."""
    x = osc.ratio
    k = osc.fock_cutoff + 1
    return x**k * (k + x / (1.0 - x))


@dataclass(frozen=True)
class NormalOrderedPolynomial:
    """``sum c_{pq} (a^dag)^p a^q`` with one coefficient per ``(p, q)``."""

    terms: tuple[tuple[int, int, float], ...] = field(default=())

    @classmethod
    def from_dict(cls, coeffs: dict[tuple[int, int], float]) -> "NormalOrderedPolynomial":
        items = sorted((p, q, c) for (p, q), c in coeffs.items() if c != 0)
        for p, q, _ in items:
            if p < 0 or q < 0:
                raise ValueError("powers must be non-negative")
        return cls(tuple(items))

    @classmethod
    def monomial(cls, p: int, q: int, coefficient: float = 1.0) -> "NormalOrderedPolynomial":
        return cls.from_dict({(p, q): coefficient})

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(p, q): c for p, q, c in self.terms}

    def __add__(self, other: "NormalOrderedPolynomial") -> "NormalOrderedPolynomial":
        acc = self.as_dict()
        for (p, q), c in other.as_dict().items():
            acc[(p, q)] = acc.get((p, q), 0.0) + c
        return NormalOrderedPolynomial.from_dict(acc)

    def evaluate(self, z):
        """Classical symbol ``sum c (z*)^p z^q``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for p, q, c in self.terms:
            out = out + c * np.conj(z) ** p * z**q
        return out


@lru_cache(maxsize=None)
def _normal_order_counts(word: str) -> tuple[tuple[tuple[int, int], int], ...]:
    """Normal form of a boson word over ``d`` (a^dag) and ``a`` as integer counts."""
    pos = word.find("ad")
    if pos < 0:
        p = word.count("d")
        if word != "d" * p + "a" * (len(word) - p):
            raise ValueError(f"invalid boson word {word!r}")
        return (((p, len(word) - p), 1),)
    # a a^dag = a^dag a + 1
    swapped = word[:pos] + "da" + word[pos + 2:]
    contracted = word[:pos] + word[pos + 2:]
    acc: dict[tuple[int, int], int] = {}
    for part in (swapped, contracted):
        for key, c in _normal_order_counts(part):
            acc[key] = acc.get(key, 0) + c
    return tuple(sorted(acc.items()))


def normal_order(word: str) -> NormalOrderedPolynomial:
    """Normal-order a product of ``d`` = a^dag and ``a`` using [a, a^dag] = 1."""
    if set(word) - {"a", "d"}:
        raise ValueError(f"boson words use 'd' (creation) and 'a' (annihilation): {word!r}")
    return NormalOrderedPolynomial.from_dict(
        {key: float(c) for key, c in _normal_order_counts(word)}
    )


def closed_form_moment(p: int, q: int, mean: float) -> float:
    """``tr(rho (a^dag)^p a^q)`` for a thermal state of mean occupation ``mean``."""
    if p != q:
        return 0.0
    return math.factorial(p) * mean**p


def boson_normal_trace(f: NormalOrderedPolynomial, osc: ThermalOscillator) -> float:
    """``C(S) tr{exp(-beta (a^dag a + 1/2)) f}`` summed over the truncated Fock basis.

    Only ``p == q`` monomials have diagonal elements, ``<n|(a^dag)^p a^p|n> =
    n! / (n - p)!``.
    """
    n = np.arange(osc.fock_cutoff + 1, dtype=float)
    weights = osc.boltzmann_weights()
    total = 0.0
    for p, q, c in f.terms:
        if p != q:
            continue
        falling = np.ones_like(n)
        for k in range(p):
            falling = falling * np.maximum(n - k, 0.0)
        total += c * float(np.dot(weights, falling))
    return total


def p_representation_quadrature(
    f: NormalOrderedPolynomial, spin, radial_points: int = 4001, angular_points: int = 64
) -> tuple[float, float]:
    """Gaussian P-function average of the symbol of ``f`` in polar coordinates.

    The weight is ``(3 / (2 pi S(S+1))) exp(-3 |z|^2 / (2 S(S+1)))`` with
    the real measure ``d^2 z = r dr dphi``. Returns ``(value, tail_bound)``:
    the radial cut R is placed where the weight has fallen by e^{-60}, and
    ``tail_bound`` is the omitted mass times ``max |c| R^{p+q}`` over the
    omitted region, estimated at R.
    """
    spin = as_halfint(spin)
    rate = 3.0 / (2.0 * _casimir(spin))
    max_degree = max((p + q for p, q, _ in f.terms), default=0)
    # push R out until r^k e^{-rate r^2} is negligible as well
    radius = math.sqrt((60.0 + max_degree * math.log(max_degree + 2.0) + max_degree) / rate)
    r = np.linspace(0.0, radius, radial_points)
    phi = 2.0 * math.pi * np.arange(angular_points) / angular_points
    z = r[:, None] * np.exp(1j * phi[None, :])
    symbol = f.evaluate(z)
    angular = symbol.mean(axis=1) * 2.0 * math.pi
    integrand = (rate / math.pi) * np.exp(-rate * r * r) * r * angular
    value = simpson(integrand.real, x=r)
    scale = max((abs(c) for _, _, c in f.terms), default=0.0)
    tail_bound = math.exp(-rate * radius * radius) * scale * radius**max_degree
    return float(value), tail_bound


def default_n_list(spin) -> list[int]:
    spin = as_halfint(spin)
    if spin.twice == 1:
        return [32, 64, 128, 256, 512]
    return [16, 32, 64, 128, 256]


def richardson_inverse_n(n_list, values) -> tuple[float, float, list[float]]:
    """Extrapolate ``a + b/N`` to N -> infinity from consecutive pairs.

    Returns the last pairwise extrapolant, the gap between the last two
    extrapolants as its error estimate, and all extrapolants.
    """
    n = [float(x) for x in n_list]
    v = [float(x) for x in values]
    if len(n) < 2:
        raise ValueError("need at least two points")
    limits = [(n[k + 1] * v[k + 1] - n[k] * v[k]) / (n[k + 1] - n[k]) for k in range(len(n) - 1)]
    error = abs(limits[-1] - limits[-2]) if len(limits) >= 2 else float("inf")
    return limits[-1], error, limits


@dataclass(frozen=True)
class SpinLimit:
    word: str
    spin_values_per_N: dict[int, float]
    extrapolated: float
    extrapolation_error: float


def spin_side_limit(p: int, q: int, spin, n_list=None) -> SpinLimit:
    """N -> infinity limit of ``(2S+1)^{-N} tr (J+)^p (J-)^q / N^{(p+q)/2}``."""
    return _spin_limit("+" * p + "-" * q, spin, n_list)


def _spin_limit(letters: str, spin, n_list=None) -> SpinLimit:
    spin = as_halfint(spin)
    n_list = sorted(n_list or default_n_list(spin))
    if len(n_list) < 3:
        raise ValueError("need at least three particle numbers")
    word = SpinWord(letters, scaled=True)
    if word.grading != 0:
        return SpinLimit(letters, {n: 0.0 for n in n_list}, 0.0, 0.0)
    values = {n: normalized_trace(word, spin, n) for n in n_list}
    limit, error, _ = richardson_inverse_n(n_list, [values[n] for n in n_list])
    return SpinLimit(letters, values, limit, error)


@dataclass(frozen=True)
class VerificationReport:
    word: str
    p: int
    q: int
    S: str
    spin_values_per_N: dict[int, float]
    extrapolated: float
    extrapolation_error: float
    boson_value: float
    abs_gap: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["spin_values_per_N"] = {str(k): v for k, v in sorted(self.spin_values_per_N.items())}
        return d


def _within(a: float, b: float, rtol: float) -> bool:
    if b == 0.0:
        return a == 0.0
    return abs(a - b) <= rtol * abs(b)


def verify_main_identity(p: int, q: int, spin, n_list=None, rtol: float = 1e-2) -> VerificationReport:
    """Compare the spin-side limit of ``(J+)^p (J-)^q`` with ``tr(rho a^dag^p a^q)``.

    The monomial already has every raising letter to the left, so the
    spin word equals its own normal-ordered form.
    """
    spin = as_halfint(spin)
    limit = spin_side_limit(p, q, spin, n_list)
    osc = thermal_state(spin)
    boson = boson_normal_trace(NormalOrderedPolynomial.monomial(p, q), osc)
    gap = abs(limit.extrapolated - boson)
    return VerificationReport(
        limit.word, p, q, str(spin), limit.spin_values_per_N,
        limit.extrapolated, limit.extrapolation_error, boson, gap, rtol,
        _within(limit.extrapolated, boson, rtol),
    )


def verify_conjecture(word: SpinWord, spin, n_list=None, rtol: float = 1e-2) -> VerificationReport:
    """Evaluate the conjectured variant on an arbitrarily ordered ladder word.

    The spin side takes the symbol-level normal ordering of the word (all
    J+ moved left, no commutators); the boson side keeps the word's order,
    maps J+ -> a^dag and J- -> a, and normal-orders with [a, a^dag] = 1
    before taking the thermal trace. For a word that is already normal
    ordered this is exactly :func:`verify_main_identity`.
    """
    if "z" in word.letters:
        raise ValueError("conjecture checks take words in J+ and J- only")
    spin = as_halfint(spin)
    p = word.letters.count("+")
    q = word.letters.count("-")
    limit = _spin_limit("+" * p + "-" * q, spin, n_list)
    osc = thermal_state(spin)
    boson_word = word.letters.replace("+", "d").replace("-", "a")
    boson = word.coefficient * boson_normal_trace(normal_order(boson_word), osc)
    spin_value = word.coefficient * limit.extrapolated
    gap = abs(spin_value - boson)
    return VerificationReport(
        word.letters, p, q, str(spin),
        {n: word.coefficient * v for n, v in limit.spin_values_per_N.items()},
        spin_value, abs(word.coefficient) * limit.extrapolation_error, boson, gap, rtol,
        _within(spin_value, boson, rtol),
    )


def report_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n"
