"""Command-line front end.

Exit codes: 0 success, 1 a bound check failed (``validate`` only),
2 configuration or parse error, 3 numeric error, 4 zero function.

The environment variable ``SEPTENSOR_SEEDLESS`` is ignored: every algorithm
here is deterministic, so there is no seed to set.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    DomainError,
    ExprSyntaxError,
    InvalidGrid,
    InvalidRank,
    NumericError,
    UnsupportedOffGrid,
    ZeroFunction,
)
from .gridfn import FunctionSource, Interval, builtin_registry, read_tabulated_csv
from .pipeline import RunConfig, decompose, reproduce_paper, summary_line, write_artifacts

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ZERO = 0, 1, 2, 3, 4

CONFIG_KEYS = {
    "builtin", "expr", "tabulated", "xmin", "xmax", "ymin", "ymax",
    "m", "n", "K", "selection_grid", "diag_grid", "out", "verbose",
}


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", metavar="NAME", help=f"one of {', '.join(builtin_registry())}")
    src.add_argument("--function-expr", metavar="STR", help="expression in x and y")
    src.add_argument("--tabulated", metavar="FILE", help="CSV with header 'x\\y, y1, y2, ...'")
    p.add_argument("--config", metavar="FILE", help="JSON config; flags override its fields")
    for name in ("xmin", "xmax", "ymin", "ymax"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--selection-grid", type=int, metavar="N")
    p.add_argument("--diag-grid", type=int, metavar="N")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--verbose", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="septensor",
        description="Separable low-rank approximation of bivariate functions "
                    "by tensorized empirical interpolation and SVD truncation.",
        epilog="SEPTENSOR_SEEDLESS is ignored; all runs are deterministic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("decompose", help="run the full pipeline and write artifacts")
    _common(p)
    p = sub.add_parser("validate", help="run all bound checks; exit 0 iff they pass")
    _common(p)
    p = sub.add_parser("reproduce-paper", help="m = n = 10 run of the reference test function")
    p.add_argument("--out", metavar="DIR", default="paper-output")
    p.add_argument("--selection-grid", type=int, default=401, metavar="N")
    p.add_argument("--diag-grid", type=int, default=1001, metavar="N")
    p.add_argument("--verbose", action="store_true")
    return parser


def _load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown fields {sorted(unknown)}")
    return doc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc = _load_config(args.config) if args.config else {}
    flags = {
        "builtin": args.builtin, "expr": args.function_expr, "tabulated": args.tabulated,
        "xmin": args.xmin, "xmax": args.xmax, "ymin": args.ymin, "ymax": args.ymax,
        "m": args.m, "n": args.n, "K": args.K,
        "selection_grid": args.selection_grid, "diag_grid": args.diag_grid,
        "out": args.out, "verbose": args.verbose,
    }
    if any(flags[k] is not None for k in ("builtin", "expr", "tabulated")):
        for k in ("builtin", "expr", "tabulated"):
            doc.pop(k, None)
    doc.update({k: v for k, v in flags.items() if v is not None})

    chosen = [k for k in ("builtin", "expr", "tabulated") if doc.get(k) is not None]
    if len(chosen) > 1:
        raise ConfigError(f"give only one function source, got {chosen}")
    if doc.get("tabulated") is not None:
        source = read_tabulated_csv(doc["tabulated"])
    else:
        try:
            domain = (Interval(float(doc.get("xmin", 0.0)), float(doc.get("xmax", 1.0))),
                      Interval(float(doc.get("ymin", 0.0)), float(doc.get("ymax", 1.0))))
        except InvalidGrid as exc:
            raise ConfigError(str(exc)) from exc
        if doc.get("expr") is not None:
            source = FunctionSource.from_expression(doc["expr"], domain)
        else:
            source = FunctionSource.builtin(doc.get("builtin", "paper-f"), domain)

    return RunConfig(
        source,
        m=int(doc.get("m", 10)),
        n=int(doc.get("n", 10)),
        K=None if doc.get("K") is None else int(doc["K"]),
        selection_points=int(doc.get("selection_grid", 401)),
        diag_points=int(doc.get("diag_grid", 1001)),
        out=None if doc.get("out") is None else Path(doc["out"]),
        verbose=bool(doc.get("verbose", False)),
    )


def _setup_logging(verbose: bool) -> None:
    root = logging.getLogger("septensor")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    root.propagate = False


def cmd_decompose(cfg: RunConfig) -> int:
    dec = decompose(cfg)
    if cfg.out is not None:
        write_artifacts(dec, cfg.out)
    print(summary_line(dec))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    dec = decompose(cfg)
    if cfg.out is not None:
        write_artifacts(dec, cfg.out)
    failed = dec.report.failed()
    for c in failed:
        print(f"FAIL {c.name} K={c.K}: {c.lhs!r} > {c.rhs!r}", file=sys.stderr)
    n = len(dec.report.bound_checks)
    print(f"{n - len(failed)}/{n} bound checks passed")
    return EXIT_OK if not failed else EXIT_CHECKS


def cmd_reproduce_paper(out_dir, selection_points: int = 401, diag_points: int = 1001) -> int:
    dec = reproduce_paper(out_dir, selection_points, diag_points)
    print(summary_line(dec))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "reproduce-paper":
            _setup_logging(args.verbose)
            if args.selection_grid < 2 or args.diag_grid < 2:
                raise ConfigError("grid sizes must be at least 2")
            return cmd_reproduce_paper(args.out, args.selection_grid, args.diag_grid)
        cfg = config_from_args(args)
        _setup_logging(cfg.verbose)
        if args.command == "decompose":
            return cmd_decompose(cfg)
        return cmd_validate(cfg)
    except ZeroFunction as exc:
        print(f"error: zero function: {exc}", file=sys.stderr)
        return EXIT_ZERO
    except (ConfigError, ExprSyntaxError, InvalidGrid, InvalidRank, UnsupportedOffGrid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, DomainError) as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
