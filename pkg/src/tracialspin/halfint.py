"""Exact half-integer quantum numbers stored as twice their value."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = ["HalfInt", "as_halfint", "parse_spin"]

_FRACTION_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


@dataclass(frozen=True, order=True)
class HalfInt:
    """A value in (1/2)Z, held as the integer ``twice``."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise TypeError(f"twice-value must be an int, got {self.twice!r}")

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse ``"k"`` or ``"k/2"`` (``k`` possibly negative)."""
        match = _FRACTION_RE.match(text)
        if match is None:
            raise ValueError(f"not an integer or half-integer: {text!r}")
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) is not None else 1
        if den == 1:
            return cls(2 * num)
        if den == 2:
            return cls(num)
        raise ValueError(f"denominator must be 1 or 2: {text!r}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def casimir(self) -> Fraction:
        """j(j+1) as an exact rational."""
        return Fraction(self.twice * (self.twice + 2), 4)

    def __float__(self) -> float:
        return self.twice / 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def as_halfint(value) -> HalfInt:
    """Coerce ``HalfInt``, str, int, Fraction or an exactly half-integral float."""
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, str):
        return HalfInt.parse(value)
    if isinstance(value, bool):
        raise TypeError("bool is not a quantum number")
    if isinstance(value, int):
        return HalfInt(2 * value)
    if isinstance(value, Fraction):
        doubled = 2 * value
        if doubled.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return HalfInt(int(doubled))
    if isinstance(value, float):
        doubled = 2 * value
        if not doubled.is_integer():
            raise ValueError(f"{value} is not a half-integer")
        return HalfInt(int(doubled))
    raise TypeError(f"cannot interpret {value!r} as a half-integer")


def parse_spin(text: str) -> HalfInt:
    """Parse a positive spin magnitude written as ``k`` or ``k/2``.

    Only a strictly positive integer numerator is accepted, so ``"0"``,
    ``"-1/2"``, ``"0.5"`` and ``"3/4"`` are all rejected with ``ValueError``.
    """
    match = _FRACTION_RE.match(text)
    if match is None or match.group(1).startswith("-"):
        raise ValueError(f"spin must be written as k or k/2 with k a positive integer: {text!r}")
    spin = HalfInt.parse(text)
    if spin.twice < 1:
        raise ValueError(f"spin must be positive: {text!r}")
    return spin
