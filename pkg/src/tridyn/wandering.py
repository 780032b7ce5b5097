"""Wandering-rate numerics for the set A of points that stay in Gamma0 for one step.

Two routes compute the same sums:

* exhaustive enumeration of admissible words (binary, ending in 1, no
  ``00``) with one matrix product per word, in :func:`tau_full`;
* the vector tree: rows ``L_k`` of row-sum vectors generated from
  ``(2, 1, 1)`` by ``M1`` and ``M1 M0``, in :func:`vector_tree` and
  :func:`lambda_tau`.

Words starting with 0 are covered on the fast route by one extra ``M0``
applied to the previous row.  Rows are int64 arrays: at row 35 the largest
product of components is below 3e14.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import DomainError, ResourceLimitError
from .exact_core import Point2
from .projective import M0, M1, ProjMatrix, apply, matrix_of_word, psi_term
from .quadrature import triangle_integral

WORD_CAP = 32
ROW_CAP = 35
EXACT_ROW_LIMIT = 30

SET_A_VERTICES = (
    Point2(Fraction(1, 2), Fraction(1, 2)),
    Point2(Fraction(2, 3), Fraction(1, 3)),
    Point2(Fraction(1), Fraction(1)),
)
PI2 = math.pi**2


def shoelace(vertices) -> Fraction:
    (x1, y1), (x2, y2), (x3, y3) = vertices
    return abs(Fraction(x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))) / 2


SET_A_AREA = shoelace(SET_A_VERTICES)


# -- admissible words --------------------------------------------------------

def is_admissible(word: str) -> bool:
    return bool(word) and set(word) <= {"0", "1"} and word[-1] == "1" and "00" not in word


def _check_cap(n: int, cap: int, what: str) -> None:
    if n < 1:
        raise DomainError(f"{what} needs n >= 1")
    if n > cap:
        raise ResourceLimitError(f"{what} is capped at {cap}, asked for {n}")


def omega_words(k: int, cap: int = WORD_CAP) -> list[str]:
    _check_cap(k, cap, "word enumeration")
    # grow on the left; a 0 may only precede a 1
    words = ["1"]
    for _ in range(k - 1):
        words = ["1" + w for w in words] + ["0" + w for w in words if w[0] == "1"]
    return sorted(words)


def _walk_words(n: int):
    """Yield ``(word, matrix)`` for every admissible word of length ``<= n``.

    Words are extended on the left, so the matrix of ``a + w`` is
    ``M_a @ M_w`` and each word costs one product.
    """
    frontier = [("1", M1)]
    for _ in range(n):
        nxt = []
        for word, m in frontier:
            yield word, m
            nxt.append(("1" + word, M1 @ m))
            if word[0] == "1":
                nxt.append(("0" + word, M0 @ m))
        frontier = nxt


def _sum_inverse_products(products: dict[int, int]) -> Fraction:
    """``sum count / product`` exactly, combining terms pairwise."""
    terms = [Fraction(c, p) for p, c in sorted(products.items())]
    while len(terms) > 1:
        paired = [a + b for a, b in zip(terms[::2], terms[1::2])]
        if len(terms) % 2:
            paired.append(terms[-1])
        terms = paired
    return terms[0] if terms else Fraction(0)


def tau_full(n: int, cap: int = WORD_CAP, *, leading: str | None = None) -> Fraction:
    """Exact ``sum_{k<=n} sum_{w in Omega_k} t_w`` by word enumeration.

    ``leading="1"`` restricts to words that start with 1.
    """
    _check_cap(n, cap, "word enumeration")
    counts: dict[int, int] = {}
    for word, m in _walk_words(n):
        if leading is not None and word[0] != leading:
            continue
        a, b, c = m.row_sums()
        prod = a * b * c
        counts[prod] = counts.get(prod, 0) + 1
    return _sum_inverse_products(counts)


# -- vector tree ---------------------------------------------------------------

@dataclass
class VectorTreeRow:
    k: int
    vectors: np.ndarray  # shape (m, 3), int64, kept as a multiset

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [tuple(int(c) for c in v) for v in self.vectors]


def _m1(rows: np.ndarray) -> np.ndarray:
    a, b, c = rows[:, 0], rows[:, 1], rows[:, 2]
    return np.stack([a + c, b, c], axis=1)


def _m10(rows: np.ndarray) -> np.ndarray:
    a, b, c = rows[:, 0], rows[:, 1], rows[:, 2]
    return np.stack([a + b + c, a, b], axis=1)


def _m0(rows: np.ndarray) -> np.ndarray:
    a, b, c = rows[:, 0], rows[:, 1], rows[:, 2]
    return np.stack([a + c, a, b], axis=1)


ROOT_VECTOR = (2, 1, 1)


def iter_rows(n: int, cap: int = ROW_CAP) -> Iterator[VectorTreeRow]:
    """Rows ``L_1 .. L_n`` one at a time, holding only two rows in memory."""
    _check_cap(n, cap, "vector tree")
    prev2 = None
    prev = np.array([ROOT_VECTOR], dtype=np.int64)
    yield VectorTreeRow(1, prev)
    for k in range(2, n + 1):
        parts = [_m1(prev)]
        if prev2 is not None:
            parts.append(_m10(prev2))
        row = np.concatenate(parts)
        yield VectorTreeRow(k, row)
        prev2, prev = prev, row


def vector_tree(n: int, cap: int = ROW_CAP) -> list[VectorTreeRow]:
    return list(iter_rows(n, cap))


def row_products(vectors: np.ndarray) -> np.ndarray:
    return vectors[:, 0] * vectors[:, 1] * vectors[:, 2]


def inverse_product_sum(vectors: np.ndarray, exact: bool = True) -> Fraction | float:
    """``sum 1/(a b c)`` over a multiset of vectors."""
    prods = row_products(vectors)
    values, counts = np.unique(prods, return_counts=True)
    if exact:
        return _sum_inverse_products({int(p): int(c) for p, c in zip(values, counts)})
    return math.fsum((counts / values.astype(float)).tolist())


@dataclass
class TauSums:
    """Per-row sums: ``lam[k-1]`` over words starting with 1, ``beta[k-1]`` over words starting with 0."""

    lam: list
    beta: list
    sizes: list[int]

    @property
    def tau_tilde(self) -> list:
        return _cumsum(self.lam)

    @property
    def tau(self) -> list:
        return _cumsum([a + b for a, b in zip(self.lam, self.beta)])


def _cumsum(xs: list) -> list:
    out, acc = [], 0
    for x in xs:
        acc = acc + x
        out.append(acc)
    return out


def tau_sums(n: int, exact: bool | None = None, cap: int = ROW_CAP) -> TauSums:
    """Row sums on the fast route; exact below ``EXACT_ROW_LIMIT`` unless told otherwise."""
    if exact is None:
        exact = n <= EXACT_ROW_LIMIT
    lam, beta, sizes = [], [], []
    prev = None
    for row in iter_rows(n, cap):
        lam.append(inverse_product_sum(row.vectors, exact))
        if prev is None:
            beta.append(Fraction(0) if exact else 0.0)
        else:
            beta.append(inverse_product_sum(_m0(prev), exact))
        sizes.append(len(row))
        prev = row.vectors
    return TauSums(lam, beta, sizes)


def lambda_tau(n: int, exact: bool | None = None) -> tuple[list, list]:
    sums = tau_sums(n, exact)
    return sums.lam, sums.tau_tilde


def lower_bound_tilde(n: int) -> Fraction:
    """``sum_{k<=n} (1/(k+1)) sum_{j<k} 1/j``, from the vectors ``(k+1, j, 1)``."""
    total = Fraction(0)
    harmonic = Fraction(0)
    for k in range(1, n + 1):
        total += harmonic / (k + 1)
        harmonic += Fraction(1, k)
    return total


# -- reports -------------------------------------------------------------------

def decimal_string(x: Fraction | float, digits: int = 30) -> str:
    if isinstance(x, float):
        return repr(x)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(x.numerator) / Decimal(x.denominator))


@dataclass
class WanderingReport:
    sums: TauSums
    rows: list[dict] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.rows)

    def csv_rows(self) -> list[list]:
        head = ["k", "row_size", "lambda", "tau_tilde", "tau", "lower", "upper", "tau_tilde_over_log2"]
        body = [
            [
                r["k"],
                r["row_size"],
                decimal_string(r["lambda"]),
                decimal_string(r["tau_tilde"]),
                decimal_string(r["tau"]),
                decimal_string(r["lower"]),
                decimal_string(r["upper"]),
                "" if r["ratio"] is None else repr(r["ratio"]),
            ]
            for r in self.rows
        ]
        return [head] + body


def wandering_bounds(n: int, exact: bool | None = None) -> WanderingReport:
    """Two-sided bounds ``m(A) tau_n <= w_n(A) <= 27 m(A) tau_n`` per row."""
    sums = tau_sums(n, exact)
    rows = []
    for k, (lam, tt, tau, size) in enumerate(zip(sums.lam, sums.tau_tilde, sums.tau, sums.sizes), 1):
        rows.append(
            {
                "k": k,
                "row_size": size,
                "lambda": lam,
                "tau_tilde": tt,
                "tau": tau,
                "lower": tau * SET_A_AREA if isinstance(tau, Fraction) else tau * float(SET_A_AREA),
                "upper": 27 * tau * SET_A_AREA if isinstance(tau, Fraction) else 27 * tau * float(SET_A_AREA),
                "ratio": float(tt) / math.log(k) ** 2 if k > 1 else None,
            }
        )
    return WanderingReport(sums, rows)


def slow_variation_diagnostic(n: int, exact: bool | None = None) -> dict:
    """Tables of ``tau~_2k / tau~_k`` and ``k lambda_k / log^2 k`` for ``k <= n/2``.

    Purely descriptive: the summary counts how often each table decreases.
    """
    sums = tau_sums(n, exact)
    tt = sums.tau_tilde
    doubling = [(k, float(tt[2 * k - 1]) / float(tt[k - 1])) for k in range(1, n // 2 + 1)]
    scaled = [(k, k * float(sums.lam[k - 1]) / math.log(k) ** 2) for k in range(2, n // 2 + 1)]

    def trend(seq):
        vals = [v for _, v in seq]
        steps = list(zip(vals, vals[1:]))
        return {"decreasing_steps": sum(b < a for a, b in steps), "steps": len(steps)}

    return {
        "doubling_ratio": doubling,
        "scaled_lambda": scaled,
        "summary": {"doubling_ratio": trend(doubling), "scaled_lambda": trend(scaled)},
    }


# -- measure of images of A ------------------------------------------------------

def image_measure(m: ProjMatrix, tol: float = 1e-8) -> float:
    """Invariant measure ``integral 1/(xy)`` of the image of A under the map of ``m``.

    The tolerance is relative to a centroid estimate, since images of long
    words are small.
    """
    verts = [apply(m, q) for q in SET_A_VERTICES]
    area = float(shoelace(verts))
    cx = sum(float(v.x) for v in verts) / 3
    cy = sum(float(v.y) for v in verts) / 3
    scale = area / (cx * cy)
    return triangle_integral(lambda x, y: 1.0 / (x * y), verts, tol * scale)


def image_bounds_check(word: str, tol: float = 1e-8) -> tuple[bool, float, float, float]:
    """``(holds, lower, measure, upper)`` for ``m(A) t <= mu(psi(A)) <= 27 m(A) t``."""
    if not is_admissible(word):
        raise DomainError(f"{word!r} is not admissible")
    m = matrix_of_word(word)
    t = float(psi_term(m) * SET_A_AREA)
    mu = image_measure(m, tol)
    return t <= mu <= 27 * t, t, mu, 27 * t


def random_admissible_word(rng: np.random.Generator, max_len: int) -> str:
    length = int(rng.integers(1, max_len + 1))
    letters = ["1"]
    while len(letters) < length:
        if letters[-1] == "0":
            letters.append("1")
        else:
            letters.append("0" if rng.random() < 0.5 else "1")
    return "".join(reversed(letters))

