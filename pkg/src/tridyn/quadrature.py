"""Adaptive Simpson quadrature on intervals and triangles."""
from __future__ import annotations

import math
from typing import Callable, Sequence

_MAX_DEPTH = 60


def _simpson(fa: float, fm: float, fb: float, a: float, b: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Uses the Richardson-corrected estimate on each accepted panel and an
    explicit stack, so deep refinement cannot hit the recursion limit.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    stack = [(a, b, fa, fm, fb, _simpson(fa, fm, fb, a, b), tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, lo, mid)
        right = _simpson(fmid, fr, fhi, mid, hi)
        delta = left + right - whole
        if depth >= _MAX_DEPTH or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
    return sign * total


def log1p_over_x(v: float) -> float:
    """``log(1 + v) / v`` extended by its limit 1 at ``v = 0``."""
    if v == 0.0:
        return 1.0
    return math.log1p(v) / v


def alternating_zeta2_half(terms: int = 200_000) -> float:
    """Partial sum of ``sum (-1)^(j+1) / j^2`` averaged over two consecutive cut-offs."""
    s = 0.0
    prev = 0.0
    for j in range(1, terms + 1):
        prev = s
        s += (-1.0) ** (j + 1) / (j * j)
    return 0.5 * (s + prev)


def triangle_integral(
    f: Callable[[float, float], float],
    vertices: Sequence[Sequence[float]],
    tol: float = 1e-8,
) -> float:
    """Integrate ``f(x, y)`` over a triangle given by three vertices.

    The triangle is mapped affinely onto the reference triangle
    ``{0 <= s, 0 <= t, s + t <= 1}``, which is integrated as nested
    one-dimensional adaptive Simpson rules.
    """
    (x0, y0), (x1, y1), (x2, y2) = ((float(a), float(b)) for a, b in vertices)
    ax, ay = x1 - x0, y1 - y0
    bx, by = x2 - x0, y2 - y0
    jac = abs(ax * by - ay * bx)
    if jac == 0.0:
        return 0.0

    def inner(s: float) -> float:
        return adaptive_simpson(
            lambda t: f(x0 + ax * s + bx * t, y0 + ay * s + by * t), 0.0, 1.0 - s, tol
        )

    return jac * adaptive_simpson(inner, 0.0, 1.0, tol)
