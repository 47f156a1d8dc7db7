"""Command-line front end: solve, sweep, figure and verify."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

from .lipkin import ModelError
from .sweep import (
    EMITS,
    METHODS,
    ConfigError,
    SweepConfig,
    build_config,
    evaluate_point,
    figure_names,
    figure_preset,
    kstate_rows,
    parse_list,
    read_config_file,
    write_outputs,
    write_table,
)
from .verify import run_suite


def _add_grid_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="INI file with a [sweep] section")
    sp.add_argument("--omega", type=int)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--chi", help="comma-separated anisotropies, e.g. -0.5,0.5,1")
    sp.add_argument("--vx-min", dest="vx_min", type=float)
    sp.add_argument("--vx-max", dest="vx_max", type=float)
    sp.add_argument("--steps", type=int, help="number of vx grid points")
    sp.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    sp.add_argument("--out", help="output CSV path ('-' for stdout)")
    sp.add_argument("--emit", choices=EMITS)
    sp.add_argument("--jobs", type=int, help="worker processes (default: all CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipkin-ent", description="Entanglement in the Lipkin model.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="evaluate one parameter point")
    solve.add_argument("--omega", type=int, required=True)
    solve.add_argument("--eps", type=float, default=1.0)
    solve.add_argument("--chi", type=float, default=0.0)
    solve.add_argument("--vx", type=float, required=True, help="coupling in units of eps")
    solve.add_argument("--methods", default="exact")

    sweep = sub.add_parser("sweep", help="grid sweep over chi and vx")
    _add_grid_flags(sweep)

    fig = sub.add_parser("figure", help="canonical sweep for one figure")
    fig.add_argument("name", choices=figure_names())
    fig.add_argument("--out", default="-")
    fig.add_argument("--emit", choices=EMITS, default="table")
    fig.add_argument("--jobs", type=int)

    ver = sub.add_parser("verify", help="run the verification suite")
    ver.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _cmd_solve(args) -> int:
    methods = parse_list(args.methods, str, "methods")
    cfg = SweepConfig(args.omega, args.eps, (args.chi,), args.vx, args.vx, 1, methods)
    rows = []
    if "kstates" in cfg.methods:
        rows.extend(kstate_rows(cfg.omega))
    grid = tuple(m for m in cfg.methods if m != "kstates")
    if grid:
        rows.extend(evaluate_point((cfg.omega, cfg.eps, args.chi, args.vx, grid, True)))
    write_table(rows, sys.stdout)
    return 0


def _cmd_sweep(args) -> int:
    values = read_config_file(args.config) if args.config else {}
    for key in ("omega", "eps", "chi", "vx_min", "vx_max", "steps", "methods", "out", "emit", "jobs"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    cfg, jobs = build_config(values)
    count = write_outputs(cfg, jobs)
    if cfg.output_path != "-":
        print(f"wrote {count} rows to {cfg.output_path}", file=sys.stderr)
    return 0


def _cmd_figure(args) -> int:
    cfg = figure_preset(args.name, args.out)
    if args.emit != cfg.emit:
        cfg = replace(cfg, emit=args.emit)
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    start = time.perf_counter()
    count = write_outputs(cfg, args.jobs)
    if cfg.output_path != "-":
        print(f"wrote {count} rows to {cfg.output_path} in {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    failed = 0
    for res in run_suite(args.level):
        print(res.line(), flush=True)
        failed += not res.passed
    print(f"{'FAILED' if failed else 'OK'} level={args.level} failures={failed}")
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep, "figure": _cmd_figure, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except (ConfigError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
