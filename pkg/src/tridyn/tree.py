"""The complete tree of rational pairs in the closed triangle.

Two independent constructions are provided:

* :func:`levels` grows the tree from the anchor ``(1/2, 1/2)`` with the four
  expansion rules (interior points, diagonal points, points of ``y = 0`` and
  points of ``x = 1``);
* :func:`mediant_levels` builds the cumulative sets by Farey sums of
  lexicographic neighbours along a growing family of segments.

:func:`equivalence_check` compares the two, :func:`locate` inverts the
growth by iterating the modified slow map, and :func:`completeness_check`
cross-checks every pair up to a denominator bound.

Words are over ``{0, 1, 2}``, most significant letter first: a node with word
``w1 ... wn`` equals ``phi_w1 o ... o phi_wn`` applied to ``(1/2, 1/2)``.
Vertices of the triangle carry the empty word and are their own anchors.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable

import numpy as np

from .errors import DomainError
from .exact_core import RationalPair, from_fractions, make_pair, mediant
from .dynamics import RegionTag, apply_word, classify, slow_map

ROOT = make_pair(1, 1, 2)
VERTICES = (make_pair(0, 0, 1), make_pair(1, 0, 1), make_pair(1, 1, 1))
_VERTEX_SET = frozenset(VERTICES)


class NodeKind(enum.Enum):
    BOUNDARY = "boundary"
    INTERIOR = "interior"


@dataclass(frozen=True)
class TreeNode:
    pair: RationalPair
    level: int
    kind: NodeKind
    word: str = ""

    def to_json(self) -> dict:
        p = self.pair
        return {
            "level": self.level,
            "num_x": str(p.num_x),
            "num_y": str(p.num_y),
            "den": str(p.den),
            "kind": self.kind.value,
            "word": self.word,
        }


def is_boundary(p: RationalPair) -> bool:
    return p.num_x == p.num_y or p.num_x == p.den or p.num_y == 0


def kind_of(p: RationalPair) -> NodeKind:
    return NodeKind.BOUNDARY if is_boundary(p) else NodeKind.INTERIOR


def _node(pair: RationalPair, level: int, word: str) -> TreeNode:
    return TreeNode(pair, level, kind_of(pair), word)


# -- rule-based growth ------------------------------------------------------

def _same_level_children(node: TreeNode) -> list[TreeNode]:
    p, q, r = node.pair.num_x, node.pair.den, node.pair.num_y
    if node.pair in _VERTEX_SET:
        return []
    if p == r:  # diagonal: phi2 sibling on y = 0
        return [_node(make_pair(p, 0, q), node.level, "2" + node.word)]
    if r == 0:  # y = 0: phi0 sibling on x = 1
        return [_node(make_pair(q, p, q), node.level, "0" + node.word)]
    return []


def _next_level_children(node: TreeNode) -> list[TreeNode]:
    p, r, q = node.pair.num_x, node.pair.num_y, node.pair.den
    lvl, w = node.level + 1, node.word
    if node.pair in _VERTEX_SET:
        return []
    if not is_boundary(node.pair):
        return [
            _node(make_pair(q, p, r + q), lvl, "0" + w),
            _node(make_pair(p, r, r + q), lvl, "1" + w),
        ]
    if p == r:
        return [_node(make_pair(p, p, p + q), lvl, "1" + w)]
    if p == q:  # (1, r/q)
        return [
            _node(make_pair(q, q, r + q), lvl, "0" + w),
            _node(make_pair(q, r, r + q), lvl, "1" + w),
        ]
    return []  # y = 0 points only have a same-level child


def expand(node: TreeNode) -> list[TreeNode]:
    """Children of ``node``: same-level siblings first, then next-level ones."""
    if node.pair in _VERTEX_SET or node.level < 0:
        raise DomainError("vertices of the triangle are not expanded")
    if not node.pair.in_triangle:
        raise DomainError(f"{node.pair} is outside the triangle")
    return _same_level_children(node) + _next_level_children(node)


def _saturate(seeds: Iterable[TreeNode]) -> dict[RationalPair, TreeNode]:
    level: dict[RationalPair, TreeNode] = {}
    stack = list(seeds)
    while stack:
        node = stack.pop()
        if node.pair in level:
            continue
        level[node.pair] = node
        stack.extend(_same_level_children(node))
    return level


def levels(n: int) -> list[dict[RationalPair, TreeNode]]:
    """Levels ``-1 .. n`` as maps pair -> node; index ``k + 1`` holds level ``k``."""
    out = [{v: TreeNode(v, -1, NodeKind.BOUNDARY, "") for v in VERTICES}]
    if n < 0:
        return out
    current = _saturate([TreeNode(ROOT, 0, NodeKind.BOUNDARY, "")])
    out.append(current)
    for _ in range(n):
        seeds = [c for node in current.values() for c in _next_level_children(node)]
        current = _saturate(seeds)
        out.append(current)
    return out


def level_set(n: int) -> tuple[set[RationalPair], set[RationalPair]]:
    """``(boundary, interior)`` point sets of level ``n``."""
    if n < -1:
        raise DomainError("levels start at -1")
    level = levels(n)[n + 1]
    boundary = {p for p, node in level.items() if node.kind is NodeKind.BOUNDARY}
    return boundary, set(level) - boundary


def side_counts(boundary: Iterable[RationalPair]) -> dict[str, int]:
    counts = {"diagonal": 0, "bottom": 0, "vertical": 0}
    for p in boundary:
        if p.num_x == p.num_y:
            counts["diagonal"] += 1
        elif p.num_y == 0:
            counts["bottom"] += 1
        else:
            counts["vertical"] += 1
    return counts


def stern_brocot_boundary(n: int) -> set[RationalPair]:
    if n < 0:
        raise DomainError("n must be >= 0")
    fracs = {Fraction(1, 2)}
    for _ in range(n):
        fracs = {g for f in fracs for g in (f / (1 + f), 1 / (1 + f))}
    out = set()
    for f in fracs:
        p, q = f.numerator, f.denominator
        out.update((make_pair(p, p, q), make_pair(p, 0, q), make_pair(q, p, q)))
    return out


def farey_fractions(n: int) -> set[Fraction]:
    """Fractions whose diagonal points make up level ``n`` of the boundary."""
    return {p.x for p in stern_brocot_boundary(n) if p.num_x == p.num_y}


# -- mediant construction ---------------------------------------------------

@dataclass(frozen=True)
class LabeledTriangle:
    v0: RationalPair
    v1: RationalPair
    v2: RationalPair
    word: str = ""

    @property
    def vertices(self) -> tuple[RationalPair, RationalPair, RationalPair]:
        return (self.v0, self.v1, self.v2)

    def split(self) -> tuple[LabeledTriangle, LabeledTriangle]:
        new = mediant(self.v0, self.v2)
        return (
            LabeledTriangle(self.v1, self.v2, new, self.word + "0"),
            LabeledTriangle(self.v0, self.v1, new, self.word + "1"),
        )

    def ell(self) -> tuple[RationalPair, RationalPair]:
        """Closed image of the segment from vertex 1 to the mediant of 0 and 2."""
        return (self.v1, mediant(self.v0, self.v2))


BASE_TRIANGLE = LabeledTriangle(*VERTICES, "")


def partition(n: int) -> list[LabeledTriangle]:
    if n < 0:
        raise DomainError("n must be >= 0")
    tris = [BASE_TRIANGLE]
    for _ in range(n):
        tris = [child for t in tris for child in t.split()]
    return tris


@dataclass
class SegmentSet:
    segments: list[tuple[RationalPair, RationalPair]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.segments)


SIDES = [(VERTICES[0], VERTICES[1]), (VERTICES[1], VERTICES[2]), (VERTICES[0], VERTICES[2])]


def segment_family(depth: int) -> SegmentSet:
    """The three sides and every closed segment image with word length ``< depth``."""
    segs = list(SIDES)
    tris = [BASE_TRIANGLE]
    for _ in range(depth):
        segs.extend(t.ell() for t in tris)
        tris = [child for t in tris for child in t.split()]
    return SegmentSet(segs)


_INT64_SAFE = 1 << 20


def _proj_array(points: list[RationalPair]) -> np.ndarray:
    big = max((p.den for p in points), default=0) >= _INT64_SAFE
    dtype = object if big else np.int64
    return np.array([p.projective() for p in points], dtype=dtype).reshape(-1, 3)


def _cross(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def points_on_segment(
    a: RationalPair, b: RationalPair, points: list[RationalPair], coords: np.ndarray | None = None
) -> list[RationalPair]:
    """Points of ``points`` on the closed segment ``[a, b]``, sorted lexicographically."""
    if coords is None:
        coords = _proj_array(points)
    normal = np.array(_cross(a.projective(), b.projective()), dtype=coords.dtype)
    hits = np.nonzero(coords @ normal == 0)[0]
    lo, hi = (a, b) if a <= b else (b, a)
    on = [points[i] for i in hits if lo <= points[i] <= hi]
    return sorted(on, key=_lex_key)


def _lex_key(p: RationalPair) -> tuple[Fraction, Fraction]:
    return (p.x, p.y)


def farey_sum(points: list[RationalPair]) -> list[RationalPair]:
    """Insert the mediant of every pair of lexicographic neighbours."""
    pts = sorted(points, key=_lex_key)
    out = pts[:1]
    for left, right in zip(pts, pts[1:]):
        out.append(mediant(left, right))
        out.append(right)
    return out


def mediant_levels(n: int) -> list[set[RationalPair]]:
    """Cumulative sets ``-1 .. n``; index ``k + 1`` holds the set of level ``k``."""
    current = set(VERTICES)
    out = [current]
    for m in range(n + 1):
        pts = sorted(current, key=_lex_key)
        coords = _proj_array(pts)
        nxt = set()
        for a, b in segment_family(m).segments:
            nxt.update(farey_sum(points_on_segment(a, b, pts, coords)))
        current = nxt
        out.append(current)
    return out


def mediant_level(n: int) -> set[RationalPair]:
    if n < -1:
        raise DomainError("levels start at -1")
    return mediant_levels(n)[n + 1]


def equivalence_check(n: int) -> bool:
    """Rule-grown level ``n`` equals the mediant set difference at ``n``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    grown = levels(n)
    cumulative = mediant_levels(n)
    return set(grown[n + 1]) == cumulative[n + 1] - cumulative[n]


def equivalence_report(n: int) -> dict[int, bool]:
    """Per-level equivalence for ``0 .. n`` sharing one construction of each side."""
    grown = levels(n)
    cumulative = mediant_levels(n)
    return {k: set(grown[k + 1]) == cumulative[k + 1] - cumulative[k] for k in range(n + 1)}


# -- inversion and audits ---------------------------------------------------

def locate(pair: RationalPair) -> tuple[int, str]:
    """Level and word of ``pair``, found by running the modified slow map."""
    if not pair.in_triangle:
        raise DomainError(f"{pair} is outside the closed triangle")
    if pair in _VERTEX_SET:
        return -1, ""
    word = []
    level = 0
    cur = pair
    while cur != ROOT:
        x, y = cur.x, cur.y
        if cur in _VERTEX_SET:
            raise DomainError(f"orbit of {pair} reached a vertex")
        if y == 0:
            word.append("2")
        elif x == 1:
            word.append("0")
        else:
            reg = classify(cur.point())
            word.append("0" if RegionTag.GAMMA0 in reg else "1")
            level += 1
        cur = from_fractions(*slow_map(cur.point(), modified=True))
    return level, "".join(word)


def reconstruct(level: int, word: str) -> RationalPair:
    """Pair obtained by applying ``word`` to the anchor of a non-vertex node."""
    if level < 0:
        raise DomainError("vertices have no anchor word")
    return from_fractions(*apply_word(word, ROOT.point()))


def canonical_pairs(max_den: int) -> list[RationalPair]:
    """Every canonical pair ``(p/q, r/q)`` in the closed triangle with ``q <= max_den``."""
    out = []
    for q in range(1, max_den + 1):
        for p in range(q + 1):
            for r in range(p + 1):
                if math.gcd(p, r, q) == 1:
                    out.append(RationalPair(p, r, q))
    return out


@dataclass
class CompletenessReport:
    max_den: int
    total: int
    max_level: int
    missing: list[RationalPair]
    duplicated: list[RationalPair]
    misplaced: list[RationalPair]

    @property
    def ok(self) -> bool:
        return not (self.missing or self.duplicated or self.misplaced)

    def to_json(self) -> dict:
        return {
            "max_den": self.max_den,
            "pairs": self.total,
            "max_level": self.max_level,
            "missing": [str(p) for p in self.missing],
            "duplicated": [str(p) for p in self.duplicated],
            "misplaced": [str(p) for p in self.misplaced],
            "ok": self.ok,
        }


def completeness_check(max_den: int) -> CompletenessReport:
    if max_den < 1:
        raise DomainError("max_den must be >= 1")
    pairs = canonical_pairs(max_den)
    located = {p: locate(p)[0] for p in pairs}
    top = max(located.values())
    grown = levels(top)
    missing, duplicated, misplaced = [], [], []
    for p, lvl in located.items():
        hits = [k - 1 for k, level in enumerate(grown) if p in level]
        if not hits:
            missing.append(p)
        elif len(hits) > 1:
            duplicated.append(p)
        elif hits[0] != lvl:
            misplaced.append(p)
    return CompletenessReport(max_den, len(pairs), top, missing, duplicated, misplaced)


def ordered_nodes(grown: list[dict[RationalPair, TreeNode]]) -> list[TreeNode]:
    out = []
    for level in grown:
        out.extend(level[p] for p in sorted(level, key=_lex_key))
    return out


def write_jsonl(grown: list[dict[RationalPair, TreeNode]], fh: IO[str]) -> int:
    count = 0
    for node in ordered_nodes(grown):
        fh.write(json.dumps(node.to_json(), separators=(",", ":")) + "\n")
        count += 1
    return count
