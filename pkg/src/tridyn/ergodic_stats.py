"""Invariant densities, transfer operators and Monte Carlo experiments.

The exact pieces (densities, one-step transfer operators) accept
``Fraction`` points and return exact values where the formula is rational.
The experiments run float orbits in numba kernels; each sample owns its own
output slot, so results do not depend on the thread count.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numba
import numpy as np

# the TBB build shipped in some images is too old for numba; prefer the
# bundled OpenMP/workqueue layers unless the user chose one explicitly
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "default"
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .dynamics import as_point, local_inverse, slow_map, strip_map, triangle_map
from .errors import ConfigurationError, DomainError
from .exact_core import StripPoint
from .quadrature import adaptive_simpson, log1p_over_x

PI2 = math.pi**2


class DensityKind(enum.Enum):
    T_INVARIANT = "T_invariant"
    S_INVARIANT = "S_invariant"
    STRIP_INVARIANT = "strip_invariant"


class TransferKind(enum.Enum):
    P_S = "P_S"
    P_F = "P_F"


class MapKind(enum.Enum):
    S = "S"
    T = "T"
    F = "F"


def density(kind: DensityKind | str, point):
    kind = DensityKind(kind)
    a, b = point
    if kind is DensityKind.STRIP_INVARIANT:
        if a < 0 or b < 0:
            raise DomainError("strip density needs u, v >= 0")
        return 1 / (1 + a * b)
    if a == 0 or (kind is DensityKind.S_INVARIANT and b == 0):
        raise DomainError("density is singular at a zero coordinate")
    if kind is DensityKind.T_INVARIANT:
        return 12.0 / (PI2 * float(a) * (1 + float(b)))
    return 1 / (a * b)


def s_density(p):
    return density(DensityKind.S_INVARIANT, p)


def strip_density(s):
    return density(DensityKind.STRIP_INVARIANT, s)


def transfer_apply(kind: TransferKind | str, f: Callable, point):
    """One application of the transfer operator of S or F to ``f`` at ``point``."""
    kind = TransferKind(kind)
    if kind is TransferKind.P_S:
        p = as_point(point)
        w = 1 / (1 + p.y) ** 3
        return w * (f(local_inverse(0, p)) + f(local_inverse(1, p)))
    u, v = point
    if isinstance(u, int):
        u = Fraction(u)
    if isinstance(v, int):
        v = Fraction(v)
    if not u > 0:
        raise DomainError("strip transfer needs u > 0")
    z = u * v + 1
    return u / z**2 * f(StripPoint(1 / z, u)) + f(StripPoint(u, v + 1))


# -- Birkhoff sums ------------------------------------------------------------

@dataclass(frozen=True)
class Observable:
    evaluator: Callable
    descriptor: dict = field(default_factory=dict)

    def __call__(self, p):
        return self.evaluator(p)


@dataclass
class BirkhoffResult:
    averages: list[float]
    truncated: bool

    @property
    def final(self) -> float:
        return self.averages[-1]


_STEP = {
    MapKind.S: slow_map,
    MapKind.T: triangle_map,
    MapKind.F: strip_map,
}


def birkhoff(map_kind: MapKind | str, f: Callable, start, n: int) -> BirkhoffResult:
    """Partial averages ``(1/m) sum_{k<m} f(R^k start)`` for ``m = 1..n``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    step = _STEP[MapKind(map_kind)]
    p = start
    total = 0.0
    out: list[float] = []
    for m in range(1, n + 1):
        total += float(f(p))
        out.append(total / m)
        if m == n:
            break
        try:
            p = step(p)
        except DomainError:
            return BirkhoffResult(out, True)
    return BirkhoffResult(out, False)


# -- configuration and sampling ---------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    sample_count: int
    iteration_count: int
    seed: int = 0
    initial_law: str = "uniform-on-triangle"

    def __post_init__(self):
        if self.sample_count < 1 or self.iteration_count < 1:
            raise ConfigurationError("sample and iteration counts must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.initial_law != "uniform-on-triangle":
            raise ConfigurationError(f"unsupported initial law {self.initial_law!r}")


def _apply_thread_cap() -> None:
    cap = os.environ.get("TRIDYN_THREADS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


def sample_triangle(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points of the open triangle, one independent stream per sample."""
    xs = np.empty(cfg.sample_count)
    ys = np.empty(cfg.sample_count)
    for i in range(cfg.sample_count):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, i])))
        while True:
            x, y = rng.random(2)
            if 0.0 < y < x:
                break
        xs[i], ys[i] = x, y
    return xs, ys


# -- numba kernels ------------------------------------------------------------

@numba.njit(cache=True)
def _digit_step(x, y):
    a = 1.0 - x
    r = np.fmod(a, y)
    k = math.floor((a - r) / y + 0.5)
    return k, y / x, r / x


@numba.njit(parallel=True, cache=True)
def _digit_sums(xs, ys, checkpoints):
    n_samples = xs.shape[0]
    n_cp = checkpoints.shape[0]
    out = np.zeros((n_samples, n_cp))
    horizon = checkpoints[n_cp - 1]
    for i in numba.prange(n_samples):
        x, y = xs[i], ys[i]
        total = 0.0
        c = 0
        for step in range(horizon):
            if y > 0.0 and (1.0 - x) / y < math.inf:
                k, x, y = _digit_step(x, y)
                total += k
            while c < n_cp and checkpoints[c] == step + 1:
                out[i, c] = total
                c += 1
    return out


@numba.njit(parallel=True, cache=True)
def _slow_cell_counts(xs, ys, checkpoints, cell):
    n_samples = xs.shape[0]
    n_cp = checkpoints.shape[0]
    out = np.zeros((n_samples, n_cp))
    horizon = checkpoints[n_cp - 1]
    for i in numba.prange(n_samples):
        x, y = xs[i], ys[i]
        count = 0.0
        c = 0
        for step in range(horizon):
            if y > 0.0:
                k, _, _ = _digit_step(x, y)
                if k == cell:
                    count += 1.0
            if y > 1.0 - x:
                x, y = y / x, (1.0 - x) / x
            else:
                x, y = x / (1.0 - y), y / (1.0 - y)
            while c < n_cp and checkpoints[c] == step + 1:
                out[i, c] = count
                c += 1
    return out


@numba.njit(cache=True)
def _g_eval(gcoef, u):
    acc = 0.0
    for j in range(gcoef.shape[0] - 1, -1, -1):
        acc = acc * u + gcoef[j]
    return acc


@numba.njit(cache=True)
def _h_eval(c0, hcos, hsin, alpha, v):
    acc = c0
    w = 2.0 * math.pi * v / alpha
    for j in range(hcos.shape[0]):
        acc += hcos[j] * math.cos((j + 1) * w) + hsin[j] * math.sin((j + 1) * w)
    return acc


@numba.njit(parallel=True, cache=True)
def _strip_averages(us, vs, n, gcoef, c0, hcos, hsin, alpha):
    n_samples = us.shape[0]
    out = np.zeros(n_samples)
    steps = np.zeros(n_samples, dtype=np.int64)
    for i in numba.prange(n_samples):
        u, v = us[i], vs[i]
        total = 0.0
        m = 0
        while m < n:
            total += _g_eval(gcoef, u) * _h_eval(c0, hcos, hsin, alpha, v)
            m += 1
            if v < 1.0:
                if v == 0.0:
                    break
                u, v = v, (1.0 / u - 1.0) / v
            else:
                v -= 1.0
        out[i] = total / m
        steps[i] = m
    return out, steps


# -- reports ------------------------------------------------------------------

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


def summarize(values: np.ndarray) -> dict[str, float]:
    q = np.quantile(values, QUANTILES)
    return {
        "mean": float(np.mean(values)),
        "median": float(q[2]),
        "q10": float(q[0]),
        "q25": float(q[1]),
        "q75": float(q[3]),
        "q90": float(q[4]),
    }


@dataclass
class StatReport:
    config: dict
    rows: dict[int, dict[str, dict[str, float]]]
    extra: dict = field(default_factory=dict)

    def median(self, n: int, stat: str) -> float:
        return self.rows[n][stat]["median"]

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "rows": {str(n): stats for n, stats in self.rows.items()},
            **self.extra,
        }

    def csv_rows(self) -> list[list]:
        out = [["n", "statistic", "mean", "median", "q10", "q25", "q75", "q90"]]
        for n, stats in self.rows.items():
            for name, s in stats.items():
                out.append([n, name] + [repr(s[k]) for k in ("mean", "median", "q10", "q25", "q75", "q90")])
        return out


def _grid(n_grid: Sequence[int]) -> np.ndarray:
    grid = np.array(sorted(set(int(n) for n in n_grid)), dtype=np.int64)
    if grid.size == 0 or grid[0] < 2:
        raise ConfigurationError("grid values must be >= 2")
    return grid


def digit_sums(cfg: ExperimentConfig, n_grid: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Digit sums ``sum_{k<n} alpha_k`` per sample (rows) and grid value (columns)."""
    _apply_thread_cap()
    grid = _grid(n_grid)
    xs, ys = sample_triangle(cfg)
    return grid, _digit_sums(xs, ys, grid)


def khinchin_experiment(cfg: ExperimentConfig, n_grid: Sequence[int]) -> StatReport:
    grid, sums = digit_sums(cfg, n_grid)
    rows = {}
    for j, n in enumerate(grid):
        n = int(n)
        col = sums[:, j]
        rows[n] = {
            "mean_digit": summarize(col / n),
            "normalized": summarize(col / (n * math.log(n) ** 2)),
        }
    return StatReport(asdict(cfg), rows)


def slow_cell_experiment(cfg: ExperimentConfig, n_grid: Sequence[int], cell: int = 0) -> StatReport:
    """Birkhoff averages of the indicator of one cell along slow-map orbits."""
    _apply_thread_cap()
    grid = _grid(n_grid)
    xs, ys = sample_triangle(cfg)
    counts = _slow_cell_counts(xs, ys, grid, cell)
    rows = {int(n): {"average": summarize(counts[:, j] / n)} for j, n in enumerate(grid)}
    return StatReport(asdict(cfg), rows, {"cell": cell})


@dataclass(frozen=True)
class HarmonicSpec:
    """``h(v) = c0 + sum_j a_j cos(2 pi j v / alpha) + b_j sin(2 pi j v / alpha)``."""

    c0: float
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        width = max(len(self.cos), len(self.sin))
        a = np.zeros(width)
        b = np.zeros(width)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        return a, b

    def evaluate(self, v: float, alpha: float) -> float:
        w = 2.0 * math.pi * v / alpha
        acc = self.c0
        for j, c in enumerate(self.cos, 1):
            acc += c * math.cos(j * w)
        for j, s in enumerate(self.sin, 1):
            acc += s * math.sin(j * w)
        return acc


@dataclass(frozen=True)
class PolySpec:
    """``g(u) = sum_i c_i u^i``."""

    coeffs: tuple[float, ...]

    @property
    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def evaluate(self, u: float) -> float:
        return sum(c * u**i for i, c in enumerate(self.coeffs))


def period_mean(h: HarmonicSpec, alpha: float, tol: float = 1e-10) -> float:
    """``(1/alpha) * integral_0^alpha h`` by adaptive quadrature."""
    return adaptive_simpson(lambda v: h.evaluate(v, alpha), 0.0, alpha, tol) / alpha


@dataclass
class GlobalObsReport:
    config: dict
    f_star: float
    h_star: float
    averages: np.ndarray
    steps: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.averages - self.f_star)))

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "f_star": self.f_star,
            "h_star": self.h_star,
            "max_abs_deviation": self.max_deviation,
            "summary": summarize(self.averages),
            "truncated_samples": int(np.sum(self.steps < self.config["iteration_count"])),
        }


_HSTAR_ZERO = 1e-9


def global_observable_experiment(
    g_spec: PolySpec, h_spec: HarmonicSpec, alpha: float, cfg: ExperimentConfig
) -> GlobalObsReport:
    if not alpha > 0:
        raise ConfigurationError("period must be positive")
    h_star = period_mean(h_spec, alpha)
    if abs(h_star) > _HSTAR_ZERO and not g_spec.is_constant:
        raise ConfigurationError("a non-constant g needs h with zero period mean")
    f_star = 0.0 if abs(h_star) <= _HSTAR_ZERO else g_spec.coeffs[0] * h_star
    _apply_thread_cap()
    xs, ys = sample_triangle(cfg)
    us, vs = ys / xs, (1.0 - xs) / ys
    hcos, hsin = h_spec.arrays()
    avgs, steps = _strip_averages(
        us, vs, cfg.iteration_count, np.asarray(g_spec.coeffs, dtype=float), float(h_spec.c0), hcos, hsin, alpha
    )
    cfg_echo = asdict(cfg)
    cfg_echo.update(alpha=alpha, g=list(g_spec.coeffs), h=asdict(h_spec))
    return GlobalObsReport(cfg_echo, f_star, h_star, avgs, steps)


# -- cell measures ------------------------------------------------------------

def cell_measure(k: int, tol: float = 1e-10) -> float:
    """Invariant measure of cell ``k``, the integral of ``log(1+v)/v`` over ``[k, k+1]``."""
    if k < 0:
        raise DomainError("cell index must be >= 0")
    return adaptive_simpson(log1p_over_x, float(k), float(k + 1), tol)


def cell_measure_sums(K: int) -> list[float]:
    """Partial sums ``sum_{k<m} cell_measure(k)`` for ``m = 1..K``."""
    out, acc = [], 0.0
    for k in range(K):
        acc += cell_measure(k)
        out.append(acc)
    return out
