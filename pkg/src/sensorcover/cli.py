"""Command-line entry point: ``sensorcover {generate,classify,solve,sweep,render}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from sensorcover.geometry import (
    InstanceParams,
    InvalidParameterError,
    build_incidence,
    derive_params,
    instance_from_json,
    instance_to_json,
    sample_instance,
)
from sensorcover.reduction import classify
from sensorcover.render import HeatmapSpec, MissingMetricError, render_heatmap
from sensorcover.solver import DEFAULT_BUDGET, solve_incidence
from sensorcover.sweep import SweepConfig, aggregate_csv, raw_csv, run_grid, sweep_metadata

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_range(text: str) -> list[float]:
    """``lo:hi:step`` inclusive of ``hi``; a bare number is a single value."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected lo:hi:step")
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or nums[2] <= 0 or nums[1] < nums[0]:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected lo:hi:step with step > 0")
    lo, hi, step = nums
    count = int((hi - lo) / step + 1e-9) + 1
    return [round(lo + k * step, 10) for k in range(count)]


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _read_instance(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return instance_from_json(text)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read instance {path!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensorcover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="sample a random instance")
    g.add_argument("--gamma", type=float)
    g.add_argument("--phi", type=float)
    g.add_argument("--base-count", type=int, default=1000)
    g.add_argument("--M", type=int)
    g.add_argument("--N", type=int)
    g.add_argument("--A", type=float, default=1.0)
    g.add_argument("--a", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    c = sub.add_parser("classify", help="classify points and sets of an instance")
    c.add_argument("instance")
    c.add_argument("--redundant-sets", action="store_true", help="also drop dominated sets in the fixpoint")
    c.add_argument("--out")

    s = sub.add_parser("solve", help="reduce, split into islands and solve exactly")
    s.add_argument("instance")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--redundant-sets", action="store_true")
    s.add_argument("--out")

    w = sub.add_parser("sweep", help="Monte Carlo sweep over the (gamma, phi) grid")
    w.add_argument("--gamma-range", type=parse_range, default=parse_range("3:12:1"))
    w.add_argument("--phi-range", type=parse_range, default=parse_range("3:12:1"))
    w.add_argument("--reps", type=int, default=105)
    w.add_argument("--base-count", type=int, default=1000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--threads", type=int, default=1)
    w.add_argument("--emit-raw", metavar="PATH")
    w.add_argument("--out", default="-")
    w.add_argument("--quiet", action="store_true")
    w.add_argument("--redundant-sets", action="store_true")

    r = sub.add_parser("render", help="heatmap of one aggregated metric")
    r.add_argument("csv")
    r.add_argument("--metric", required=True)
    r.add_argument("--scale", choices=("unit", "data"), default="unit")
    r.add_argument("--block", type=int, default=16)
    r.add_argument("--out", default="heatmap.pgm")
    return parser


def _cmd_generate(args) -> None:
    if args.gamma is not None or args.phi is not None:
        if args.gamma is None or args.phi is None:
            raise UsageError("--gamma and --phi must be given together")
        params = derive_params(args.gamma, args.phi, args.base_count, args.seed)
    else:
        if args.M is None or args.N is None or args.a is None:
            raise UsageError("give either --gamma/--phi or --M/--N/--a")
        params = InstanceParams(M=args.M, N=args.N, A=args.A, a=args.a, seed=args.seed)
    _write(instance_to_json(sample_instance(params)), args.out)


def _cmd_classify(args) -> None:
    inst = _read_instance(args.instance)
    _write(classify(build_incidence(inst), redundant_sets=args.redundant_sets).to_json(), args.out)


def _cmd_solve(args) -> None:
    inst = _read_instance(args.instance)
    sol = solve_incidence(
        build_incidence(inst), budget=args.budget, workers=args.threads, redundant_sets=args.redundant_sets
    )
    _write(sol.to_json(), args.out)


def _cmd_sweep(args) -> None:
    config = SweepConfig(
        gamma_values=args.gamma_range,
        phi_values=args.phi_range,
        reps=args.reps,
        base_count=args.base_count,
        master_seed=args.seed,
        workers=args.threads,
        progress=not args.quiet,
        redundant_sets=args.redundant_sets,
    )
    cells = run_grid(config)
    _write(aggregate_csv(cells), args.out)
    if args.out not in (None, "-"):
        Path(args.out).with_suffix(".meta.json").write_text(sweep_metadata(config))
    if args.emit_raw:
        _write(raw_csv(cells), args.emit_raw)


def _cmd_render(args) -> None:
    try:
        text = Path(args.csv).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv!r}: {exc}") from exc
    try:
        paths = render_heatmap(text, HeatmapSpec(args.metric, args.scale, Path(args.out), args.block))
    except MissingMetricError as exc:
        raise UsageError(str(exc.args[0])) from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps({k: str(v) for k, v in paths.items()}), file=sys.stderr)


COMMANDS = {
    "generate": _cmd_generate,
    "classify": _cmd_classify,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
