"""The triangle map, its slow version, the strip model and digit expansions.

Everything here is generic over the scalar type: pass ``Fraction``
coordinates for exact results or ``float`` coordinates for speed.  Plain
``int`` coordinates are promoted to ``Fraction``.  Boundary tests use the
strict inequalities of the set definitions with no tolerance, so exact
scalars must be used wherever membership matters.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DomainError
from .exact_core import Point2, RationalPair, Scalar, StripPoint
from .projective import ProjMatrix, matrix_of_word

DEFAULT_MAX_DIGITS = 64


class RegionTag(enum.Enum):
    GAMMA0 = "Gamma0"
    GAMMA1 = "Gamma1"
    LAMBDA = "Lambda"
    DIAGONAL = "Diagonal"
    VERTICAL_SIDE = "VerticalSide"
    TRIANGLE_CELL = "TriangleCell"
    SET_A = "SetA"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class Region:
    """All tags that apply to a point; ``cell`` is set iff TRIANGLE_CELL is."""

    tags: frozenset
    cell: int | None = None

    def __contains__(self, tag: RegionTag) -> bool:
        return tag in self.tags

    def labels(self) -> set[str]:
        out = {t.value for t in self.tags if t is not RegionTag.TRIANGLE_CELL}
        if self.cell is not None:
            out.add(f"TriangleCell({self.cell})")
        return out


@dataclass(frozen=True)
class DigitSequence:
    digits: tuple[int, ...]
    terminated: bool

    def __len__(self) -> int:
        return len(self.digits)

    def to_json(self) -> dict:
        return {"digits": list(self.digits), "terminated": self.terminated}


def as_point(p) -> Point2:
    if isinstance(p, RationalPair):
        return p.point()
    x, y = p
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(y, int):
        y = Fraction(y)
    return Point2(x, y)


def _as_strip(s) -> StripPoint:
    u, v = s
    if isinstance(u, int):
        u = Fraction(u)
    if isinstance(v, int):
        v = Fraction(v)
    return StripPoint(u, v)


def in_closed_triangle(p: Point2) -> bool:
    x, y = p
    return 0 <= y <= x <= 1


def _in_gamma0(x, y) -> bool:
    return y > 1 - x


def cell_index(p: Point2) -> int:
    """The ``k`` with ``1 - x - k y >= 0 > 1 - x - (k+1) y``; needs ``y > 0``."""
    x, y = as_point(p)
    if not y > 0:
        raise DomainError("cell index is undefined on y = 0")
    k = math.floor((1 - x) / y)
    # float division can land one off; fix with the defining inequalities
    while 1 - x - k * y < 0:
        k -= 1
    while 1 - x - (k + 1) * y >= 0:
        k += 1
    return k


def classify(p) -> Region:
    p = as_point(p)
    x, y = p
    if not in_closed_triangle(p):
        return Region(frozenset({RegionTag.OUTSIDE}))
    tags = set()
    cell = None
    if _in_gamma0(x, y):
        tags.add(RegionTag.GAMMA0)
        s = slow_map(p)
        if _in_gamma0(*s):
            tags.add(RegionTag.SET_A)
    else:
        tags.add(RegionTag.GAMMA1)
    if y == 0:
        tags.add(RegionTag.LAMBDA)
    else:
        tags.add(RegionTag.TRIANGLE_CELL)
        cell = cell_index(p)
    if x == y:
        tags.add(RegionTag.DIAGONAL)
    if x == 1:
        tags.add(RegionTag.VERTICAL_SIDE)
    return Region(frozenset(tags), cell)


def _check_triangle(p: Point2) -> None:
    if not in_closed_triangle(p):
        raise DomainError(f"point {tuple(p)} is outside the closed triangle")


def triangle_map(p) -> Point2:
    p = as_point(p)
    _check_triangle(p)
    x, y = p
    if not y > 0:
        raise DomainError("the triangle map is undefined on y = 0")
    k = cell_index(p)
    return Point2(y / x, (1 - x - k * y) / x)


def slow_map(p, modified: bool = False) -> Point2:
    p = as_point(p)
    _check_triangle(p)
    x, y = p
    if modified and y == 0:
        return Point2(x, x)
    if _in_gamma0(x, y):
        return Point2(y / x, (1 - x) / x)
    return Point2(x / (1 - y), y / (1 - y))


def slow_jacobian_det(p) -> Scalar:
    """Jacobian determinant of the slow map at ``p`` (branch formula)."""
    x, y = as_point(p)
    if _in_gamma0(x, y):
        return 1 / x**3
    return 1 / (1 - y) ** 3


def local_inverse(branch: int, p) -> Point2:
    p = as_point(p)
    _check_triangle(p)
    x, y = p
    if branch == 0:
        return Point2(1 / (1 + y), x / (1 + y))
    if branch == 1:
        return Point2(x / (1 + y), y / (1 + y))
    if branch == 2:
        if x != y:
            raise DomainError("branch 2 is only defined on the diagonal")
        return Point2(x, 0 * x)
    raise DomainError(f"unknown branch {branch!r}")


def apply_word(word: str | Iterable[int], p) -> Point2:
    """Fold inverse branches right to left: ``phi_w1 o ... o phi_wn (p)``."""
    p = as_point(p)
    for letter in reversed([int(c) for c in word]):
        p = local_inverse(letter, p)
    return p


def first_passage(p) -> int:
    p = as_point(p)
    _check_triangle(p)
    if not p.y > 0:
        raise DomainError("points of y = 0 never reach Gamma0")
    steps = 1
    while not _in_gamma0(*p):
        p = slow_map(p)
        steps += 1
    return steps


def iterate(fn: Callable, p, n: int):
    for _ in range(n):
        p = fn(p)
    return p


def orbit(fn: Callable, p, n: int) -> list:
    """``[p, fn(p), ..., fn^n(p)]``; stops early if ``fn`` raises DomainError."""
    out = [p]
    for _ in range(n):
        try:
            p = fn(p)
        except DomainError:
            break
        out.append(p)
    return out


def jump_check(p, atol: float = 1e-12) -> bool:
    p = as_point(p)
    t = triangle_map(p)
    s = iterate(slow_map, p, first_passage(p))
    if isinstance(p.x, Fraction) and isinstance(p.y, Fraction):
        return tuple(t) == tuple(s)
    return abs(t.x - s.x) <= atol and abs(t.y - s.y) <= atol


def triangle_sequence(p, max_digits: int = DEFAULT_MAX_DIGITS) -> DigitSequence:
    p = as_point(p)
    _check_triangle(p)
    if max_digits < 0:
        raise DomainError("max_digits must be non-negative")
    digits = []
    while True:
        if p.y == 0:
            return DigitSequence(tuple(digits), True)
        if len(digits) >= max_digits:
            return DigitSequence(tuple(digits), False)
        digits.append(cell_index(p))
        p = triangle_map(p)


def to_strip(p) -> StripPoint:
    x, y = as_point(p)
    if not (x > 0 and y > 0):
        raise DomainError("strip coordinates need x > 0 and y > 0")
    return StripPoint(y / x, (1 - x) / y)


def from_strip(s) -> Point2:
    u, v = _as_strip(s)
    if not u > 0 or v < 0:
        raise DomainError("strip point needs u > 0 and v >= 0")
    z = 1 + u * v
    return Point2(1 / z, u / z)


def strip_map(s) -> StripPoint:
    u, v = _as_strip(s)
    if not u > 0:
        raise DomainError("strip map needs u > 0")
    if v < 1:
        if v == 0:
            raise DomainError("strip map is singular at v = 0")
        return StripPoint(v, (1 / u - 1) / v)
    return StripPoint(u, v - 1)


def cylinder(digits: DigitSequence | Sequence[int]) -> ProjMatrix:
    """Matrix of ``phi1^a1 o phi0 o phi1^a2 o phi0 o ...``."""
    if isinstance(digits, DigitSequence):
        digits = digits.digits
    word = "".join("1" * a + "0" for a in digits)
    return matrix_of_word(word)
