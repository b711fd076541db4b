"""Command line: ``isodyn simulate|check|plot``.

Exit codes: 0 success, 1 suite failure, 2 config error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..lattice import LatticeError, workers
from .config import ConfigError, load_config

EXIT_OK, EXIT_SUITE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path):
    try:
        return load_config(path)
    except FileNotFoundError:
        raise ConfigError([(0, f"config file not found: {path}")]) from None


def cmd_simulate(args) -> int:
    from .runner import RunFailure, run_simulate

    cfg = _load(args.config)
    log = None if args.quiet else print
    try:
        out = run_simulate(cfg, args.csv, log=log)
    except RunFailure as exc:
        _err(f"runtime failure: {exc}")
        _err(f"last good snapshot: {exc.snapshot if exc.snapshot else 'none'}")
        return EXIT_RUNTIME
    print(f"wrote {out}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .suites import SUITES, run_checks

    cfg = _load(args.config)
    if args.only and args.only not in SUITES:
        raise ConfigError([(0, f"unknown suite {args.only!r}; choose from {', '.join(SUITES)}")])
    results = run_checks(cfg, args.only, log=print)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_SUITE if failed else EXIT_OK


def cmd_plot(args) -> int:
    from .runner import read_csv
    from .svgplot import line_chart

    try:
        header, rows = read_csv(args.csv)
    except (OSError, StopIteration, ValueError) as exc:
        _err(f"cannot read {args.csv}: {exc}")
        return EXIT_CONFIG
    if args.column not in header:
        _err(f"column {args.column!r} not in {', '.join(header)}")
        return EXIT_CONFIG
    xi, yi = header.index("t"), header.index(args.column)
    svg = line_chart([r[xi] for r in rows], [r[yi] for r in rows],
                     title=f"{args.column} vs t", xlabel="t", ylabel=args.column)
    out = Path(args.output) if args.output else Path(args.csv).with_suffix(f".{args.column}.svg")
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return EXIT_OK


def _thread_cap():
    """Apply ISODYN_THREADS to BLAS pools too, when threadpoolctl is present."""
    import contextlib

    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=workers())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isodyn", description="Lattice isometrodynamics laboratory.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("simulate", help="evolve a configuration and write the diagnostics CSV")
    s.add_argument("config")
    s.add_argument("--csv", help="override output.csv_path")
    s.add_argument("-q", "--quiet", action="store_true")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("check", help="run the verification suites")
    c.add_argument("config")
    c.add_argument("--only", metavar="SUITE", help="run a single suite")
    c.set_defaults(func=cmd_check)

    pl = sub.add_parser("plot", help="SVG line chart of one CSV column against t")
    pl.add_argument("csv")
    pl.add_argument("column")
    pl.add_argument("-o", "--output")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        with _thread_cap():
            return args.func(args)
    except (ConfigError, LatticeError) as exc:
        _err(f"config error:\n{exc}")
        return EXIT_CONFIG
    except Exception as exc:
        _err(f"runtime failure: {type(exc).__name__}: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
