"""Command-line entry point: ``capdrop <subcommand> ...``.

Exit codes: 0 success (a classified end of branch counts as success),
1 verification failure, 2 IO or usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time

from . import branchfile as bf
from .bifurcation import bifurcation_table, make_bifurcation_point
from .continuation import ContinuationConfig, continue_branch
from .errors import BranchFileError, CapdropError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2

# flag name -> ContinuationConfig field
CONFIG_FLAGS = {
    "N": "N", "M": "M", "ds": "ds_init", "ds_min": "ds_min", "ds_max": "ds_max",
    "tol": "tol_newton", "max_newton": "max_newton", "c1_max": "c1_max",
    "chord_arc_max": "chord_arc_max", "loop_eps": "loop_eps", "loop_s_min": "loop_s_min",
}


class UsageError(Exception):
    pass


def _direction(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("direction must be +1 or -1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="capdrop", description="Rotating capillary drops: "
                                "bifurcation values, branch continuation and checks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bif-values", help="print bifurcation speeds c_mk")
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--kmax", type=int, required=True)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("--full", action="store_true", help="add refinement and branch smoke tests")
    v.add_argument("--seed", type=int, default=20240611)

    c = sub.add_parser("continue", help="trace a branch from a bifurcation point")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--dir", type=_direction, default=1, help="+1 or -1")
    c.add_argument("--steps", type=int, default=None)
    c.add_argument("--N", type=int)
    c.add_argument("--M", type=int)
    c.add_argument("--ds", type=float, help="initial step")
    c.add_argument("--ds-min", type=float)
    c.add_argument("--ds-max", type=float)
    c.add_argument("--tol", type=float, help="Newton tolerance")
    c.add_argument("--max-newton", type=int)
    c.add_argument("--c1-max", type=float)
    c.add_argument("--chord-arc-max", type=float)
    c.add_argument("--loop-eps", type=float)
    c.add_argument("--loop-s-min", type=float)
    c.add_argument("--config", help="JSON file of config fields; flags take precedence")
    c.add_argument("--out", required=True)

    r = sub.add_parser("render", help="SVG of one drop shape from a branch file")
    r.add_argument("--in", dest="inp", required=True)
    which = r.add_mutually_exclusive_group(required=True)
    which.add_argument("--index", type=int)
    which.add_argument("--s", type=float)
    r.add_argument("--out", required=True)

    e = sub.add_parser("export-csv", help="branch summary as CSV")
    e.add_argument("--in", dest="inp", required=True)
    e.add_argument("--out", required=True)
    return p


def config_from_args(args) -> ContinuationConfig:
    fields = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        known = {f.name for f in dataclasses.fields(ContinuationConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        fields.update(loaded)
    for flag, name in CONFIG_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            fields[name] = value
    try:
        return ContinuationConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_bif_values(args) -> int:
    if args.m < 2:
        raise UsageError("m must be >= 2")
    if args.kmax < 1:
        raise UsageError("kmax must be >= 1")
    for k, mk, c in bifurcation_table(args.m, args.kmax):
        print(f"{k}, {mk}, {c:.16g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suites

    t0 = time.perf_counter()
    results = run_suites(full=args.full, seed=args.seed)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    level = "full" if args.full else "quick"
    print(f"{level}: {len(results) - len(failed)}/{len(results)} passed "
          f"in {time.perf_counter() - t0:.1f} s")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_continue(args) -> int:
    cfg = config_from_args(args)
    if args.m < 2:
        raise UsageError("m must be >= 2")
    if not 1 <= args.k < cfg.N:
        raise UsageError(f"k must satisfy 1 <= k < N={cfg.N}")
    if args.steps is not None and args.steps < 0:
        raise UsageError("steps must be >= 0")
    bp = make_bifurcation_point(args.m, args.k, cfg.N)
    header = bf.BranchFileHeader.new(args.m, args.k, args.dir, cfg)
    with open(args.out, "w") as fh:
        writer = bf.BranchWriter(fh, header)

        def emit(p):
            if p.s > 0:  # the circle itself is implied by the header
                writer.point(p)
                logging.info("s=%.5g c=%.12g newton=%d", p.s, p.c, p.newton_iters)

        rec = continue_branch(bp, args.dir, cfg, steps=args.steps, on_point=emit)
        writer.status(rec.status)
    print(f"{rec.status}: {len(rec.points) - 1} points, s={rec.points[-1].s:.6g}, "
          f"c={rec.points[-1].c:.12g} -> {args.out}")
    return EXIT_OK


def cmd_render(args) -> int:
    header, points, _ = bf.read_branch(args.inp)
    try:
        p = bf.select_point(points, args.index, args.s)
    except IndexError as exc:
        raise UsageError(str(exc)) from exc
    svg = bf.render_svg(p.z, header.M)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(svg)
    return EXIT_OK


def cmd_export_csv(args) -> int:
    _, points, _ = bf.read_branch(args.inp)
    with open(args.out, "w", newline="") as fh:
        bf.write_csv(points, fh)
    return EXIT_OK


COMMANDS = {
    "bif-values": cmd_bif_values, "verify": cmd_verify, "continue": cmd_continue,
    "render": cmd_render, "export-csv": cmd_export_csv,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, OSError, BranchFileError, CapdropError, json.JSONDecodeError) as exc:
        print(f"capdrop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
