"""Exact points of the circle group T = R/Z."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]

#: hard cap on denominators appearing anywhere in exact arithmetic
DENOMINATOR_CAP = 2**63


class DenominatorOverflow(ArithmeticError):
    """An exact computation produced a denominator beyond DENOMINATOR_CAP."""


def check_denominator(q: Fraction) -> Fraction:
    if q.denominator >= DENOMINATOR_CAP:
        raise DenominatorOverflow(f"denominator {q.denominator} exceeds 2^63")
    return q


def frac_mod1(q: Rational) -> Fraction:
    q = Fraction(q)
    return q - math.floor(q)


def parse_fraction(s: str | int | Fraction) -> Fraction:
    return Fraction(s) if not isinstance(s, str) else Fraction(s.strip())


def format_fraction(q: Rational) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class TorusPoint:
    """A point of R/Z held as a reduced fraction in [0, 1)."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", frac_mod1(self.value))

    @classmethod
    def of(cls, q: Rational) -> "TorusPoint":
        return cls(Fraction(q))

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.value + other.value)

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.value - other.value)

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-self.value)

    def __mul__(self, n: int) -> "TorusPoint":
        return TorusPoint(self.value * n)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.value == 0

    def e(self) -> complex:
        """The unit complex number exp(2 pi i q)."""
        return cmath.exp(2j * math.pi * float(self.value))

    def __str__(self) -> str:
        return format_fraction(self.value)


ZERO = TorusPoint(Fraction(0))
