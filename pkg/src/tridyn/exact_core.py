"""Exact rational pairs on a common denominator.

A :class:`RationalPair` stores ``(num_x/den, num_y/den)`` with
``gcd(num_x, num_y, den) == 1``.  This is the form the mediant needs: the
mediant of two pairs is computed on the stored integers, so the
representation matters and is fixed once here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DomainError

Scalar = Union[Fraction, float, int]


class Point2(NamedTuple):
    """Point of the closed triangle; coordinates may be Fractions or floats."""

    x: Scalar
    y: Scalar


class StripPoint(NamedTuple):
    """Point ``(u, v)`` of the strip ``(0, 1] x [0, inf)``."""

    u: Scalar
    v: Scalar


class LexOrdering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True, slots=True)
class RationalPair:
    num_x: int
    num_y: int
    den: int

    @property
    def x(self) -> Fraction:
        return Fraction(self.num_x, self.den)

    @property
    def y(self) -> Fraction:
        return Fraction(self.num_y, self.den)

    @property
    def in_triangle(self) -> bool:
        return 0 <= self.num_y <= self.num_x <= self.den

    def point(self) -> Point2:
        return Point2(self.x, self.y)

    def projective(self) -> tuple[int, int, int]:
        """Integer vector ``(den, num_x, num_y)`` used by the matrix layer."""
        return (self.den, self.num_x, self.num_y)

    def __lt__(self, other: RationalPair) -> bool:
        return lex_compare(self, other) is LexOrdering.LESS

    def __le__(self, other: RationalPair) -> bool:
        return lex_compare(self, other) is not LexOrdering.GREATER

    def __gt__(self, other: RationalPair) -> bool:
        return lex_compare(self, other) is LexOrdering.GREATER

    def __ge__(self, other: RationalPair) -> bool:
        return lex_compare(self, other) is not LexOrdering.LESS

    def __str__(self) -> str:
        return format_pair(self)


def make_pair(px: int, py: int, q: int) -> RationalPair:
    """Canonical pair ``(px/q, py/q)`` reduced by ``gcd(px, py, q)``."""
    if q <= 0:
        raise DomainError(f"denominator must be positive, got {q}")
    if px < 0 or py < 0:
        raise DomainError(f"negative numerator in ({px}, {py}, {q})")
    g = math.gcd(px, py, q)
    return RationalPair(px // g, py // g, q // g)


def from_projective(q: int, px: int, py: int) -> RationalPair:
    return make_pair(px, py, q)


def from_fractions(x, y) -> RationalPair:
    """Pair over the least common denominator of two rationals."""
    x, y = Fraction(x), Fraction(y)
    q = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    return make_pair(x.numerator * (q // x.denominator), y.numerator * (q // y.denominator), q)


def mediant(a: RationalPair, b: RationalPair) -> RationalPair:
    return make_pair(a.num_x + b.num_x, a.num_y + b.num_y, a.den + b.den)


def lex_compare(a: RationalPair, b: RationalPair) -> LexOrdering:
    # cross-multiplication; denominators are positive
    lhs, rhs = a.num_x * b.den, b.num_x * a.den
    if lhs == rhs:
        lhs, rhs = a.num_y * b.den, b.num_y * a.den
    if lhs < rhs:
        return LexOrdering.LESS
    if lhs > rhs:
        return LexOrdering.GREATER
    return LexOrdering.EQUAL


def format_pair(p: RationalPair) -> str:
    """Canonical text ``"px/q,py/q"`` (common denominator kept)."""
    return f"{p.num_x}/{p.den},{p.num_y}/{p.den}"


def parse_pair(text: str, *, require_triangle: bool = True) -> RationalPair:
    """Parse ``"a/b,c/d"`` or ``"a,c"``; unreduced input is accepted.

    Raises ``ValueError`` naming the violated constraint.
    """
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y' with two coordinates, got {text!r}")
    try:
        x, y = (Fraction(part) for part in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational in {text!r}: {exc}") from None
    if "." in text or "e" in text.lower():
        raise ValueError(f"exact input required (fractions or integers), got {text!r}")
    if x < 0 or y < 0:
        raise ValueError(f"{text!r} violates y >= 0")
    if require_triangle:
        if x < y:
            raise ValueError(f"{text!r} violates x >= y")
        if x > 1:
            raise ValueError(f"{text!r} violates x <= 1")
    return from_fractions(x, y)
