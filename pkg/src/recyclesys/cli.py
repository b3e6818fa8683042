"""Command line entry point.

Exit codes: 0 success, 1 infeasible, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import cap_schedule, load_scenario, load_sweep, read_toml
from .dataset import load_dataset, resolve_dataset_path
from .errors import (
    ComparisonError,
    ConfigurationError,
    DomainError,
    PathwayError,
    SolverError,
    UnknownNameError,
)
from .pathway import interpolate_caps
from .scenario import compare, load_result, report, run_scenarios, sweep, sweep_table, write_result
from .simplex import LpStatus
from .system import validate_system

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


def cmd_validate(args) -> int:
    ds = load_dataset(resolve_dataset_path(args.dataset, Path.cwd()))
    problems = validate_system(ds.graph)
    for d in problems:
        print(d)
    g = ds.graph
    print(
        f"{ds.name}: {len(g.commodities)} commodities, {len(g.technologies)} technologies, "
        f"{len(g.profiles)} profiles, {len(problems)} problems"
    )
    return EXIT_CONFIG if problems else EXIT_OK


def cmd_run(args) -> int:
    loaded = [load_scenario(p) for p in args.scenario]
    results = run_scenarios([x.spec for x in loaded], workers=args.workers)
    for x, r in zip(loaded, results):
        out = Path(args.out) / x.spec.name if args.out else x.output
        write_result(r, out)
        if not args.quiet:
            print(report(r), end="")
        print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    loaded = load_sweep(args.sweep)
    result = sweep(loaded.spec, workers=args.workers)
    out = Path(args.out) if args.out else loaded.output
    out.mkdir(parents=True, exist_ok=True)
    table = sweep_table(result)
    (out / "sweep.csv").write_text(table, encoding="utf-8")
    if not args.quiet:
        print(table, end="")
    if not result.monotone():
        print("warning: secondary share rises along the grid", file=sys.stderr)
    print(f"wrote {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    results = [load_result(d) for d in args.results]
    text = compare(results, args.reference).text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_caps(args) -> int:
    path = Path(args.schedule).resolve()
    sched = cap_schedule(read_toml(path), path.parent)
    years = args.year or list(range(*sched.span)) + [sched.span[1]]
    for y in years:
        print(f"{y} {interpolate_caps(sched, y):.10g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recyclesys", description="Energy and industry pathways with endogenous recycling.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a dataset directory")
    s.add_argument("dataset", help="dataset directory or builtin:<name>")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("run", help="run scenario files")
    s.add_argument("scenario", nargs="+")
    s.add_argument("--out", help="parent directory for results (default: per-file setting)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-q", "--quiet", action="store_true")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep file")
    s.add_argument("sweep")
    s.add_argument("--out")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-q", "--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("compare", help="compare result directories")
    s.add_argument("results", nargs="+")
    s.add_argument("--reference", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("caps", help="print interpolated CO2 caps")
    s.add_argument("schedule", help="file with a [caps] section")
    s.add_argument("--year", type=int, action="append", help="repeatable; default: every year of the span")
    s.set_defaults(func=cmd_caps)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PathwayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE if exc.status == LpStatus.INFEASIBLE else EXIT_SOLVER
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigurationError, DomainError, UnknownNameError, ComparisonError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
