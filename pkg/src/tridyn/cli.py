"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 failed audit.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import dynamics, ergodic_stats, tree, wandering
from .errors import ConfigurationError, DomainError, ResourceLimitError
from .exact_core import Point2, format_pair, parse_pair

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _exact_pair(text: str):
    try:
        return parse_pair(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _point(text: str, allow_float: bool):
    """Exact pair when possible; floats only where the command permits them."""
    try:
        return parse_pair(text).point(), False
    except ValueError as exc:
        if not allow_float or "exact input required" not in str(exc):
            raise UsageError(str(exc)) from None
    try:
        x, y = (float(c) for c in text.split(","))
    except ValueError:
        raise UsageError(f"malformed point {text!r}") from None
    if not 0.0 <= y <= x <= 1.0:
        raise UsageError(f"{text!r} violates 0 <= y <= x <= 1")
    return Point2(x, y), True


def _fmt_scalar(v) -> str:
    return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else repr(float(v))


def _fmt_point(p) -> str:
    return f"{_fmt_scalar(p[0])},{_fmt_scalar(p[1])}"


@contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_json(obj, path: str | None) -> None:
    with _sink(path) as fh:
        fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _emit_csv(rows: list[list], path: str | None) -> None:
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


# -- subcommands ---------------------------------------------------------------

def cmd_digits(args) -> int:
    pair = _exact_pair(args.point)
    seq = dynamics.triangle_sequence(pair, args.n or dynamics.DEFAULT_MAX_DIGITS)
    _emit_json(seq.to_json(), args.out)
    return EXIT_OK


_ORBIT_MAPS = {
    "S": dynamics.slow_map,
    "Stilde": lambda p: dynamics.slow_map(p, modified=True),
    "T": dynamics.triangle_map,
}


def cmd_orbit(args) -> int:
    p, is_float = _point(args.point, allow_float=True)
    if args.map == "F":
        pts = dynamics.orbit(dynamics.strip_map, dynamics.to_strip(p), args.n)
    else:
        pts = dynamics.orbit(_ORBIT_MAPS[args.map], p, args.n)
    if args.format == "csv":
        _emit_csv([["step", "first", "second"]] + [[i, _fmt_scalar(a), _fmt_scalar(b)] for i, (a, b) in enumerate(pts)], args.out)
    else:
        _emit_json({"map": args.map, "float_input": is_float, "points": [_fmt_point(q) for q in pts],
                    "truncated": len(pts) < args.n + 1}, args.out)
    return EXIT_OK


def cmd_tree(args) -> int:
    grown = tree.levels(args.levels)
    with _sink(args.out) as fh:
        tree.write_jsonl(grown, fh)
    return EXIT_OK


def tree_audit(n: int) -> dict:
    grown = tree.levels(n)
    cards, sides, farey = True, True, True
    for k in range(n + 1):
        level = grown[k + 1]
        boundary = {p for p, node in level.items() if node.kind is tree.NodeKind.BOUNDARY}
        interior = len(level) - len(boundary)
        cards &= len(boundary) == 3 * 2**k and 2 * interior == k * 2**k
        sides &= set(tree.side_counts(boundary).values()) == {2**k}
        farey &= boundary == tree.stern_brocot_boundary(k)
    equiv = tree.equivalence_report(n)
    return {
        "levels": n,
        "equivalence": all(equiv.values()),
        "cardinalities": cards and sides,
        "boundary_farey": farey,
        "per_level_equivalence": {str(k): v for k, v in equiv.items()},
    }


def cmd_tree_check(args) -> int:
    report = tree_audit(args.levels)
    ok = report["equivalence"] and report["cardinalities"] and report["boundary_farey"]
    if args.format == "json":
        _emit_json({**report, "ok": ok}, args.out)
    else:
        word = {True: "ok", False: "FAILED"}
        with _sink(args.out) as fh:
            fh.write(f"equivalence: {word[report['equivalence']]}, cardinalities: {word[report['cardinalities']]}\n")
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_locate(args) -> int:
    pair = _exact_pair(args.pair)
    level, word = tree.locate(pair)
    _emit_json({"pair": format_pair(pair), "level": level, "word": word}, args.out)
    return EXIT_OK


def cmd_completeness(args) -> int:
    report = tree.completeness_check(args.max_den)
    _emit_json(report.to_json(), args.out)
    return EXIT_OK if report.ok else EXIT_AUDIT


def cmd_measure(args) -> int:
    K = args.n or 100
    sums = ergodic_stats.cell_measure_sums(K)
    rows = [["k", "cell_measure", "partial_sum", "partial_sum_over_log2"]]
    prev = 0.0
    for k, s in enumerate(sums):
        m = k + 1
        rows.append([k, repr(s - prev), repr(s), repr(s / math.log(m) ** 2) if m > 1 else ""])
        prev = s
    if args.format == "csv":
        _emit_csv(rows, args.out)
    else:
        first = sums[0]
        _emit_json({"cells": K, "first_cell": first, "pi2_over_12": math.pi**2 / 12,
                    "normalization_error": abs(first - math.pi**2 / 12),
                    "partial_sum": sums[-1], "partial_sum_over_log2": sums[-1] / math.log(K) ** 2 if K > 1 else None},
                   args.out)
    return EXIT_OK


def random_rational_points(rng: np.random.Generator, count: int, max_den: int = 10**6) -> list[Point2]:
    out = []
    while len(out) < count:
        q = int(rng.integers(2, max_den + 1))
        p = int(rng.integers(1, q + 1))
        r = int(rng.integers(1, p + 1))
        out.append(Point2(Fraction(p, q), Fraction(r, q)))
    return out


def transfer_audit(samples: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    pts = random_rational_points(rng, samples)
    s_ok = sum(ergodic_stats.transfer_apply("P_S", ergodic_stats.s_density, p) == ergodic_stats.s_density(p) for p in pts)
    strip = [dynamics.to_strip(p) for p in pts]
    f_ok = sum(ergodic_stats.transfer_apply("P_F", ergodic_stats.strip_density, s) == ergodic_stats.strip_density(s)
               for s in strip)
    return {"samples": samples, "seed": seed, "P_S_exact": s_ok, "P_F_exact": f_ok,
            "ok": s_ok == samples and f_ok == samples}


def cmd_transfer_check(args) -> int:
    report = transfer_audit(args.samples or 1000, args.seed)
    _emit_json(report, args.out)
    return EXIT_OK if report["ok"] else EXIT_AUDIT


def _observable(name: str, map_kind: str, alpha: float):
    if name == "one":
        return lambda p: 1.0
    if name == "gamma0":
        if map_kind == "F":
            raise UsageError("the gamma0 observable lives on the triangle, not the strip")
        return lambda p: 1.0 if p[1] > 1 - p[0] else 0.0
    if name == "cos":
        if map_kind != "F":
            raise UsageError("the cos observable lives on the strip; use --map F")
        return lambda s: math.cos(2 * math.pi * float(s[1]) / alpha)
    raise UsageError(f"unknown observable {name!r}")


def cmd_birkhoff(args) -> int:
    p, is_float = _point(args.point, allow_float=True)
    if not is_float:
        p = Point2(float(p.x), float(p.y))
    start = dynamics.to_strip(p) if args.map == "F" else p
    f = _observable(args.observable, args.map, args.alpha)
    res = ergodic_stats.birkhoff(args.map, f, start, args.n or 1000)
    _emit_json({"map": args.map, "observable": args.observable, "n": len(res.averages),
                "final_average": res.final, "truncated": res.truncated}, args.out)
    return EXIT_OK


def _default_grid(iters: int) -> list[int]:
    grid = [10**j for j in range(2, 9) if 10**j < iters]
    return grid + [iters]


def cmd_khinchin(args) -> int:
    cfg = ergodic_stats.ExperimentConfig(args.samples or 1000, args.iters or 10_000, args.seed)
    report = ergodic_stats.khinchin_experiment(cfg, _default_grid(cfg.iteration_count))
    if args.format == "csv":
        _emit_csv(report.csv_rows(), args.out)
    else:
        _emit_json(report.to_json(), args.out)
    return EXIT_OK


GLOBAL_CASES = {
    "zero-mean": (ergodic_stats.PolySpec((0.0, 1.0)), ergodic_stats.HarmonicSpec(0.0, (), (1.0,))),
    "constant": (ergodic_stats.PolySpec((2.0,)), ergodic_stats.HarmonicSpec(1.0, (1.0,), ())),
    "trivial": (ergodic_stats.PolySpec((1.0,)), ergodic_stats.HarmonicSpec(1.0)),
}


def cmd_global_obs(args) -> int:
    cfg = ergodic_stats.ExperimentConfig(args.samples or 100, args.iters or 10**5, args.seed)
    g, h = GLOBAL_CASES[args.case]
    report = ergodic_stats.global_observable_experiment(g, h, args.alpha, cfg)
    _emit_json({"case": args.case, **report.to_json()}, args.out)
    return EXIT_OK


def cmd_wandering(args) -> int:
    report = wandering.wandering_bounds(args.rows)
    if args.format == "json":
        _emit_json({"rows": [dict(zip(report.csv_rows()[0], r)) for r in report.csv_rows()[1:]]}, args.out)
    else:
        _emit_csv(report.csv_rows(), args.out)
    return EXIT_OK


def cmd_slow_var(args) -> int:
    _emit_json(wandering.slow_variation_diagnostic(args.rows), args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tridyn", description="Triangle map dynamics and the tree of rational pairs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text, *, fmt=("json",), **flags):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        for flag, kw in flags.items():
            p.add_argument("--" + flag.replace("_", "-"), **kw)
        return p

    add("digits", cmd_digits, "triangle-sequence digits of an exact point",
        point={"required": True}, n={"type": _positive, "default": None, "help": "maximum number of digits"})
    orbit = add("orbit", cmd_orbit, "orbit of a point (floats allowed)", fmt=("json", "csv"),
                point={"required": True}, n={"type": _positive, "default": 10})
    orbit.add_argument("--map", choices=["S", "Stilde", "T", "F"], default="S")
    add("tree", cmd_tree, "write the tree levels -1..N as JSON lines", fmt=("jsonl",),
        levels={"type": int, "required": True})
    add("tree-check", cmd_tree_check, "audit cardinalities and equivalence up to level N", fmt=("text", "json"),
        levels={"type": int, "required": True})
    add("locate", cmd_locate, "level and word of an exact pair", pair={"required": True})
    add("completeness", cmd_completeness, "audit every pair up to a denominator",
        max_den={"type": _positive, "required": True})
    add("measure", cmd_measure, "invariant measure of the first N cells", fmt=("json", "csv"),
        n={"type": _positive, "default": None})
    add("transfer-check", cmd_transfer_check, "exact fixed-point audit of the transfer operators",
        samples={"type": _positive, "default": None}, seed={"type": _seed, "default": 0})
    bk = add("birkhoff", cmd_birkhoff, "Birkhoff average along one orbit (floats allowed)",
             point={"required": True}, n={"type": _positive, "default": None},
             alpha={"type": float, "default": math.sqrt(2)})
    bk.add_argument("--map", choices=["S", "T", "F"], default="S")
    bk.add_argument("--observable", choices=["one", "gamma0", "cos"], default="gamma0")
    add("khinchin", cmd_khinchin, "digit-sum Monte Carlo", fmt=("json", "csv"),
        samples={"type": _positive, "default": None}, iters={"type": _positive, "default": None},
        seed={"type": _seed, "default": 0})
    go = add("global-obs", cmd_global_obs, "Birkhoff averages of a global observable on the strip",
             samples={"type": _positive, "default": None}, iters={"type": _positive, "default": None},
             seed={"type": _seed, "default": 0}, alpha={"type": float, "default": math.sqrt(2)})
    go.add_argument("--case", choices=sorted(GLOBAL_CASES), default="zero-mean")
    add("wandering", cmd_wandering, "wandering-rate table", fmt=("csv", "json"),
        rows={"type": _positive, "required": True})
    add("slow-var", cmd_slow_var, "slow-variation diagnostic tables", rows={"type": _positive, "required": True})
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigurationError, ResourceLimitError) as exc:
        parser.print_usage(sys.stderr)
        print(f"tridyn {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"tridyn {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
