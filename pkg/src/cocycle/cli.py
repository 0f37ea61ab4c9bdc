"""Command-line front end.

Subcommands:
  check         residual checks (additivity defect identity, symmetry)
  reconstruct   build a sample table of f on a rational grid
  verify-bound  modulus-of-continuity bound checks for a reconstruction
  bench         timing of the lattice solver on stress inputs

Exit codes: 0 all checks passed / output written, 1 at least one check
failed, 2 usage or evaluation error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .continuous import (
    ConvergenceError,
    LatticeSolver,
    grid_keys,
    h_rational,
    reconstruct_table,
)
from .expressions import (
    BUILTIN_SEEDS,
    EvaluationError,
    FuncSpec,
    ParseError,
    bivariate_expression,
    builtin_seed,
    cocycle_from_seed,
    seed_expression,
)
from .rational import parse_rational
from .smooth import QuadratureError, reconstruct_ck_table
from .verify import (
    VerificationReport,
    check_bound_c0,
    kurepa_residual,
    symmetry_residual,
)

_ENGINE_CHOICES = ("euclid-chain", "dyadic", "ck")


def _cast_interval(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"interval needs two endpoints, got {text!r}")
    a, b = (float(p) for p in parts)
    return (a, b)


def _cast_deltas(text: str) -> list[Fraction]:
    return [parse_rational(p) for p in text.split(",") if p.strip()]


def _cast_engine(text: str) -> str:
    if text not in _ENGINE_CHOICES:
        raise ValueError(f"engine must be one of {_ENGINE_CHOICES}, got {text!r}")
    return text


def _cast_format(text: str) -> str:
    if text not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {text!r}")
    return text


# config-file keys and their parsers; keys match option names with
# dashes replaced by underscores
_CASTS = {
    "expr": str,
    "seed": str,
    "vars": str,
    "out": str,
    "format": _cast_format,
    "engine": _cast_engine,
    "box": float,
    "epsilon": float,
    "tolerance": float,
    "samples": int,
    "rng_seed": int,
    "denominators": int,
    "dyadic_level": int,
    "interval": _cast_interval,
    "delta": _cast_deltas,
}


@dataclass
class RunConfig:
    """Settings after merging CLI flags over config-file values."""

    command: str
    expr: str | None = None
    seed: str | None = None
    vars: str = "x,y"
    out: str | None = None
    format: str = "csv"
    engine: str = "euclid-chain"
    box: float = 2.0
    epsilon: float = 1e-6
    tolerance: float = 1e-9
    samples: int = 1000
    rng_seed: int = 0
    denominators: int | None = None
    dyadic_level: int | None = None
    interval: tuple[float, float] | None = None
    deltas: list[Fraction] = field(default_factory=list)

    def function(self) -> FuncSpec:
        if (self.expr is None) == (self.seed is None):
            raise ValueError("exactly one of --expr or --seed is required")
        if self.seed is not None:
            g = builtin_seed(self.seed) if self.seed in BUILTIN_SEEDS else seed_expression(self.seed)
            return cocycle_from_seed(g)
        names = tuple(s.strip() for s in self.vars.split(","))
        if len(names) != 2 or not all(names):
            raise ValueError("--vars must name two comma-separated variables")
        return bivariate_expression(self.expr, variables=names)


def _load_config(path: str) -> dict:
    mapping: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CASTS:
                raise ValueError(f"{path}:{lineno}: unknown setting {key!r}")
            try:
                mapping[key] = _CASTS[key](value.strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return mapping


def _resolve(args: argparse.Namespace) -> RunConfig:
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    cfg = RunConfig(command=args.command)
    if args.command == "verify-bound":
        cfg.box = 1.0

    def pick(name, fallback):
        cli = getattr(args, name, None)
        if cli is not None:
            return cli
        if name in config:
            return config[name]
        return fallback

    # function source: a CLI --expr/--seed overrides both config keys
    if getattr(args, "expr", None) is not None or getattr(args, "seed", None) is not None:
        cfg.expr, cfg.seed = args.expr, args.seed
    else:
        cfg.expr, cfg.seed = config.get("expr"), config.get("seed")

    cfg.vars = pick("vars", cfg.vars)
    cfg.out = pick("out", cfg.out)
    cfg.format = pick("format", cfg.format)
    cfg.engine = pick("engine", cfg.engine)
    cfg.box = pick("box", cfg.box)
    cfg.epsilon = pick("epsilon", cfg.epsilon)
    cfg.tolerance = pick("tolerance", cfg.tolerance)
    cfg.samples = pick("samples", cfg.samples)
    cfg.rng_seed = pick("rng_seed", cfg.rng_seed)
    cfg.denominators = pick("denominators", None)
    cfg.dyadic_level = pick("dyadic_level", None)
    interval = pick("interval", None)
    cfg.interval = tuple(interval) if interval is not None else None
    deltas = getattr(args, "delta", None)
    if deltas:
        cfg.deltas = [d for group in deltas for d in (group if isinstance(group, list) else [group])]
    elif "delta" in config:
        cfg.deltas = list(config["delta"])
    return cfg


def _write_text(out: str | None, text: str) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(cfg: RunConfig, report: VerificationReport) -> int:
    _write_text(cfg.out, report.to_ndjson())
    return 0 if report.passed else 1


def _cmd_check(cfg: RunConfig) -> int:
    F = cfg.function()
    rng = random.Random(cfg.rng_seed)
    span = cfg.box

    def draw():
        return rng.uniform(-span, span)

    triples = [(draw(), draw(), draw()) for _ in range(cfg.samples)]
    pairs = [(draw(), draw()) for _ in range(cfg.samples)]
    report = kurepa_residual(F, triples, tolerance=cfg.tolerance)
    report.results.extend(symmetry_residual(F, pairs, tolerance=cfg.tolerance).results)
    return _emit_report(cfg, report)


def _cmd_reconstruct(cfg: RunConfig) -> int:
    F = cfg.function()
    if cfg.interval is None:
        raise ValueError("--interval is required for reconstruct")
    keys = grid_keys(
        cfg.interval,
        denominators=cfg.denominators,
        dyadic_level=cfg.dyadic_level,
    )
    if cfg.engine == "ck":
        table = reconstruct_ck_table(F, keys, tol=cfg.tolerance)
    else:
        table = reconstruct_table(F, keys, engine=cfg.engine, epsilon=cfg.epsilon)
    if cfg.format == "json":
        _write_text(cfg.out, json.dumps(table.to_json_obj(), indent=2) + "\n")
    else:
        _write_text(cfg.out, table.to_csv_text())
    return 0


def _cmd_verify_bound(cfg: RunConfig) -> int:
    F = cfg.function()
    if not cfg.deltas:
        raise ValueError("--delta is required for verify-bound (repeatable)")
    M = max(1, int(cfg.box))
    den = cfg.denominators or 2 * max(d.denominator for d in cfg.deltas)
    keys = grid_keys((-M, M), denominators=den)
    if cfg.engine == "ck":
        table = reconstruct_ck_table(F, keys, tol=cfg.tolerance)
    else:
        table = reconstruct_table(F, keys, engine=cfg.engine, epsilon=cfg.epsilon)
    report = check_bound_c0(F, table, cfg.deltas, M, tolerance=cfg.tolerance)
    return _emit_report(cfg, report)


def _cmd_bench(cfg: RunConfig) -> int:
    F = cfg.function()
    stress = Fraction(1, 1000003)
    t0 = time.perf_counter()
    value = h_rational(F, stress)
    chain_seconds = time.perf_counter() - t0

    solver = LatticeSolver(F)
    keys = grid_keys((0, 1), dyadic_level=12)
    t0 = time.perf_counter()
    for k in keys:
        solver.h(k, "dyadic")
    grid_seconds = time.perf_counter() - t0

    payload = {
        "h_rational": {
            "point": f"{stress.numerator}/{stress.denominator}",
            "value": value,
            "seconds": chain_seconds,
        },
        "dyadic_grid": {
            "level": 12,
            "points": len(keys),
            "seconds": grid_seconds,
        },
    }
    _write_text(cfg.out, json.dumps(payload, indent=2) + "\n")
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "reconstruct": _cmd_reconstruct,
    "verify-bound": _cmd_verify_bound,
    "bench": _cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fn = common.add_mutually_exclusive_group()
    fn.add_argument("--expr", help="bivariate expression for F(x, y)")
    fn.add_argument(
        "--seed",
        help="univariate seed g(t); F is its additivity defect "
        f"(builtins: {', '.join(sorted(BUILTIN_SEEDS))})",
    )
    common.add_argument("--vars", help="comma-separated variable names for --expr (default x,y)")
    common.add_argument("--config", help="key=value settings file; explicit flags win")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--tolerance", type=float, help="check tolerance (default 1e-9)")
    common.add_argument("--rng-seed", type=int, dest="rng_seed", help="sampling seed (default 0)")

    parser = argparse.ArgumentParser(
        prog="cocycle",
        description="Solve f(x+y) - f(x) - f(y) = F(x, y) and verify the bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[common], help="residual checks on random samples")
    p_check.add_argument("--samples", type=int, help="sample count (default 1000)")
    p_check.add_argument("--box", type=float, help="sampling half-width (default 2)")

    p_rec = sub.add_parser("reconstruct", parents=[common], help="tabulate f on a rational grid")
    p_rec.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))
    p_rec.add_argument("--denominators", type=int, help="all reduced p/q with q up to N")
    p_rec.add_argument("--dyadic-level", type=int, dest="dyadic_level", help="grid k/2^j")
    p_rec.add_argument("--engine", choices=_ENGINE_CHOICES)
    p_rec.add_argument("--epsilon", type=float, help="limit tolerance for real points")
    p_rec.add_argument("--format", choices=("csv", "json"))

    p_bound = sub.add_parser(
        "verify-bound", parents=[common], help="modulus bound checks for a reconstruction"
    )
    p_bound.add_argument(
        "--delta",
        action="append",
        type=parse_rational,
        help="rational scale in (0, 1/2); repeatable",
    )
    p_bound.add_argument("--box", type=float, help="check on [-M, M] (default 1)")
    p_bound.add_argument("--denominators", type=int, help="sample grid density for f")
    p_bound.add_argument("--engine", choices=_ENGINE_CHOICES)
    p_bound.add_argument("--epsilon", type=float)

    p_bench = sub.add_parser("bench", parents=[common], help="lattice solver timings")
    del p_bench

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(args)
        return _COMMANDS[args.command](cfg)
    except (ParseError, EvaluationError, ConvergenceError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
