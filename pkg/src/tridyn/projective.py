"""3x3 integer matrices of compositions of the inverse branches.

A point ``(x, y)`` is the projective vector ``(1, x, y)``; the matrix with
rows ``v = (r, s, t)``, ``v1 = (r1, s1, t1)``, ``v2 = (r2, s2, t2)`` acts as

    (x, y) -> ((r1 + s1 x + t1 y) / (r + s x + t y),
               (r2 + s2 x + t2 y) / (r + s x + t y)).

Composition order: a word ``w1 w2 ... wn`` denotes ``phi_w1 o ... o phi_wn``
and its matrix is ``M_w1 @ M_w2 @ ... @ M_wn``.  Every other module that
turns words into maps goes through :func:`matrix_of_word`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .exact_core import Point2

Row = tuple[int, int, int]


@dataclass(frozen=True, slots=True)
class ProjMatrix:
    v: Row
    v1: Row
    v2: Row

    @property
    def rows(self) -> tuple[Row, Row, Row]:
        return (self.v, self.v1, self.v2)

    def __matmul__(self, other: ProjMatrix) -> ProjMatrix:
        cols = list(zip(*other.rows))
        return ProjMatrix(*(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows))

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def row_sums(self) -> Row:
        return (sum(self.v), sum(self.v1), sum(self.v2))

    def act(self, vec: Sequence[int]) -> Row:
        """Matrix-vector product on a projective integer vector."""
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.rows)

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


IDENTITY = ProjMatrix((1, 0, 0), (0, 1, 0), (0, 0, 1))
M0 = ProjMatrix((1, 0, 1), (1, 0, 0), (0, 1, 0))
M1 = ProjMatrix((1, 0, 1), (0, 1, 0), (0, 0, 1))
M10 = M1 @ M0


def generator(branch: int) -> ProjMatrix:
    if branch == 0:
        return M0
    if branch == 1:
        return M1
    raise DomainError(f"no matrix for branch {branch!r}; only 0 and 1 are linear fractional")


def _letters(word: str | Iterable[int]) -> list[int]:
    return [int(c) for c in word]


def matrix_of_word(word: str | Iterable[int]) -> ProjMatrix:
    m = IDENTITY
    for letter in _letters(word):
        m = m @ generator(letter)
    return m


def apply(m: ProjMatrix, p: Point2) -> Point2:
    x, y = p
    (r, s, t), (r1, s1, t1), (r2, s2, t2) = m.rows
    z = r + s * x + t * y
    if z == 0:
        raise DomainError(f"projective denominator vanishes at {p}")
    if isinstance(z, int):
        z = Fraction(z)
    return Point2((r1 + s1 * x + t1 * y) / z, (r2 + s2 * x + t2 * y) / z)


def jacobian_det(m: ProjMatrix, p: Point2):
    """Jacobian determinant ``1 / (r + s x + t y)^3`` of the map of ``m``."""
    r, s, t = m.v
    if r + s + t <= 0:
        raise DomainError("first row must have positive sum")
    z = r + s * p[0] + t * p[1]
    if isinstance(z, int):
        z = Fraction(z)
    return 1 / z**3


def psi_term(m: ProjMatrix) -> Fraction:
    """``1 / ((r1+s1+t1)(r2+s2+t2)(r+s+t))``."""
    a, b, c = m.row_sums()
    if a <= 0 or b <= 0 or c <= 0:
        raise DomainError(f"row sums must be positive, got {(a, b, c)}")
    return Fraction(1, a * b * c)


def normalized(v: Sequence[int]) -> tuple[Fraction, Fraction, Fraction]:
    total = sum(v)
    if any(c < 0 for c in v) or total == 0:
        raise DomainError(f"need a non-zero vector with non-negative entries, got {tuple(v)}")
    return tuple(Fraction(c, total) for c in v)


def narayana(n: int) -> int:
    """Narayana's cows recursion with ``f0, f1, f2 = 0, 1, 0`` run from index 0."""
    if n < 0:
        raise DomainError("index must be non-negative")
    f = [0, 1, 0]
    while len(f) <= n:
        f.append(f[-1] + f[-3])
    return f[n]


def narayana_matrix(n: int) -> ProjMatrix:
    """``M0**n`` assembled from the Narayana sequence."""
    f = [narayana(k) for k in range(n + 5)]
    return ProjMatrix(
        (f[n + 4], f[n + 2], f[n + 3]),
        (f[n + 3], f[n + 1], f[n + 2]),
        (f[n + 2], f[n], f[n + 1]),
    )


def _euclid(a: Sequence[Fraction], b: Sequence[Fraction]) -> float:
    return math.sqrt(sum(float(p - q) ** 2 for p, q in zip(a, b)))


def spread(m: ProjMatrix) -> float:
    """``|P_v - P_v1| + |P_v - P_v2|`` in the Euclidean norm."""
    pv, p1, p2 = (normalized(row) for row in m.rows)
    return _euclid(pv, p1) + _euclid(pv, p2)


def decay_estimate(n: int) -> tuple[float, float]:
    """Return ``(d_tilde(n), d(n))`` with ``d(n) = 27 sqrt(3) d_tilde(n)``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    dt = spread(narayana_matrix(n))
    return dt, 27 * math.sqrt(3) * dt
