"""Exact half-integer and signed-square-root arithmetic.

Angular momentum quantum numbers are stored as twice their value so that
every spin, projection and total J is an exact integer. Clebsch-Gordan
coefficients are carried as sign * sqrt(rational) and only turned into
floats at the edge.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import NumericOverflow

TOLERANCE = 1e-10

HalfIntLike = Union["HalfInt", int, Fraction, str]


@dataclass(frozen=True, order=True)
class HalfInt:
    """A number of the form n/2, stored as the integer n."""

    twice: int

    @classmethod
    def of(cls, value: HalfIntLike) -> "HalfInt":
        """Build from an int, a Fraction, a string like "3/2", or a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a half-integer")
        if isinstance(value, int):
            return cls(2 * value)
        frac = Fraction(value)
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not a multiple of 1/2")
        return cls(int(doubled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_half_odd(self) -> bool:
        return self.twice % 2 == 1

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + other.twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - other.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __float__(self) -> float:
        return self.twice / 2

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


@dataclass(frozen=True)
class SignedSqrtRational:
    """The exact value sign * sqrt(radicand) with a non-negative rational radicand."""

    sign: int
    radicand: Fraction

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.radicand < 0:
            raise ValueError(f"radicand must be non-negative, got {self.radicand}")
        if (self.sign == 0) != (self.radicand == 0):
            raise ValueError("sign is zero exactly when the radicand is zero")

    @classmethod
    def zero(cls) -> "SignedSqrtRational":
        return cls(0, Fraction(0))

    @classmethod
    def from_square(cls, sign: int, square: Fraction) -> "SignedSqrtRational":
        if square == 0:
            return cls.zero()
        return cls(sign, Fraction(square))

    def is_zero(self) -> bool:
        return self.sign == 0

    def squared(self) -> Fraction:
        return self.radicand

    def __mul__(self, other: "SignedSqrtRational") -> "SignedSqrtRational":
        return SignedSqrtRational.from_square(
            self.sign * other.sign, self.radicand * other.radicand
        )

    def __truediv__(self, other: "SignedSqrtRational") -> "SignedSqrtRational":
        if other.is_zero():
            raise ZeroDivisionError("division by a zero SignedSqrtRational")
        return SignedSqrtRational.from_square(
            self.sign * other.sign, self.radicand / other.radicand
        )

    def __neg__(self) -> "SignedSqrtRational":
        return SignedSqrtRational(-self.sign, self.radicand)

    def scale_sign(self, phase: int) -> "SignedSqrtRational":
        """Multiply by an integer phase of +1 or -1."""
        return SignedSqrtRational(self.sign * phase, self.radicand)

    def __float__(self) -> float:
        return ssr_to_float(self)


def ssr_to_float(v: SignedSqrtRational) -> float:
    """Round sign * sqrt(radicand) to a float."""
    if v.sign == 0:
        return 0.0
    try:
        magnitude = math.sqrt(float(v.radicand))
    except OverflowError as e:
        raise NumericOverflow(f"radicand {v.radicand} is out of float range") from e
    if math.isinf(magnitude):
        raise NumericOverflow(f"radicand {v.radicand} is out of float range")
    return v.sign * magnitude


def halfint_phase(n: HalfInt) -> int:
    """Return (-1)**(2n), the sign picked up by a spin-n state under a 2*pi turn."""
    return -1 if n.twice % 2 else 1


def parity_sign(k: int) -> int:
    """Return (-1)**k for an integer k."""
    return -1 if k % 2 else 1


_QUARTER_TURNS = (1 + 0j, 1j, -1 + 0j, -1j)


def minus_one_power(n: HalfInt) -> complex:
    """Return (-1)**n read as exp(i*pi*n), exact for half-integer n."""
    return _QUARTER_TURNS[n.twice % 4]


@lru_cache(maxsize=None)
def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    return math.factorial(n)


def twice_to_int(twice: int) -> int:
    """Halve an even twice-value, refusing odd ones."""
    if twice % 2:
        raise ValueError(f"{twice}/2 is not an integer")
    return twice // 2
