"""Command-line entry point: ``fuzzy-placer {evaluate,select,simulate,plot}``.

Exit codes: 0 success, 2 input error, 3 domain error (all scores zero).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config
from .errors import FuzzyPlacerError, InvalidMetrics, ZeroMass
from .resources import ResourceMetrics, resource_probability, score_all
from .selector import U64_MASK, normalize, sample, select_argmax
from .simulator import ClusterState, SimResource, Strategy, run

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3

STRATEGIES = {
    "argmax": Strategy.FUZZY_ARGMAX,
    "sample": Strategy.FUZZY_SAMPLE,
    "round-robin": Strategy.ROUND_ROBIN,
    "always-first": Strategy.ALWAYS_FIRST,
}


class InputError(Exception):
    pass


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= U64_MASK:
        raise argparse.ArgumentTypeError(f"must fit in an unsigned 64-bit integer: {text}")
    return value


def _count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _rulebase(args):
    return config.load_rulebase(config.resolve_rulebase_path(args.rulebase), allow_defaults=args.defaults)


def cmd_evaluate(args, out):
    try:
        metrics = ResourceMetrics(args.speed, args.reliability, args.concentration)
    except InvalidMetrics as exc:
        raise InputError(f"--{exc.field}: {exc.detail}") from None
    score = resource_probability(metrics, _rulebase(args))
    print(config.fmt(score.p), file=out)
    return EXIT_OK


def cmd_select(args, out):
    strategy = STRATEGIES[args.strategy]
    if strategy not in (Strategy.FUZZY_ARGMAX, Strategy.FUZZY_SAMPLE):
        raise InputError("select supports --strategy argmax or sample")
    if strategy is Strategy.FUZZY_SAMPLE and args.seed is None:
        raise InputError("--seed is required for --strategy sample")
    inventory = config.load_inventory(args.inventory)
    if not inventory:
        raise InputError(f"{args.inventory}: inventory has no resources")
    scores = score_all(inventory, _rulebase(args))

    try:
        weights = normalize(scores).weights
    except ZeroMass:
        if strategy is Strategy.FUZZY_SAMPLE:
            raise
        weights = None

    if strategy is Strategy.FUZZY_ARGMAX:
        chosen = select_argmax(scores)
    else:
        chosen = sample(normalize(scores), args.seed, args.draw_index)

    if args.verbose:
        print("id,p,weight", file=out)
        for i, s in enumerate(scores):
            w = config.fmt(weights[i]) if weights is not None else "nan"
            print(f"{s.resource_id},{config.fmt(s.p)},{w}", file=out)
    print(chosen, file=out)
    return EXIT_OK


def cmd_simulate(args, out):
    strategy = STRATEGIES[args.strategy]
    inventory = config.load_inventory(args.inventory)
    if not inventory:
        raise InputError(f"{args.inventory}: inventory has no resources")
    # concentration is derived from placements; the inventory column is ignored
    state = ClusterState.fresh(SimResource(rid, m.speed, m.reliability) for rid, m in inventory)
    report = run(state, strategy, _rulebase(args), args.seed, args.chunks, trace=args.trace)
    text = config.dump_report(report, strategy.value, args.seed, args.chunks)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    print(f"max_share={config.fmt(report.max_share)} min_share={config.fmt(report.min_share)}", file=out)
    return EXIT_OK


def cmd_plot(args, out):
    rb = _rulebase(args)
    variables = rb.variables
    if args.variable not in variables:
        raise InputError(f"unknown variable {args.variable!r} (have: {', '.join(variables)})")
    text = config.curves_csv(variables[args.variable])
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzy-placer",
        description="Score storage resources with Mamdani fuzzy inference and pick placement targets.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--rulebase",
        metavar="PATH",
        help=f"rulebase document (default: ${config.RULEBASE_ENV}, else built-in rules)",
    )
    common.add_argument(
        "--defaults",
        action="store_true",
        help="fall back to the built-in rulebase when the rulebase file does not exist",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="score one resource")
    p.add_argument("--speed", type=float, required=True, help="access speed, Mb/s")
    p.add_argument("--reliability", type=float, required=True, help="uptime, percent")
    p.add_argument("--concentration", type=float, required=True, help="share of stored data, percent")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("select", parents=[common], help="pick a resource from an inventory file")
    p.add_argument("--inventory", metavar="PATH", required=True)
    p.add_argument("--strategy", choices=list(STRATEGIES), default="argmax")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--draw-index", type=_u64, default=0, help="keyed draw number for --strategy sample")
    p.add_argument("--verbose", action="store_true", help="print id, p and normalized weight per resource")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("simulate", parents=[common], help="place chunks on a simulated cluster")
    p.add_argument("--inventory", metavar="PATH", required=True)
    p.add_argument("--strategy", choices=list(STRATEGIES), default="sample")
    p.add_argument("--chunks", type=_count, required=True)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", metavar="PATH", help="report file (default: stdout)")
    p.add_argument("--trace", action="store_true", help="record every placement with its score snapshot")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", parents=[common], help="export membership curves as CSV")
    p.add_argument("--variable", required=True)
    p.add_argument("--out", metavar="PATH", help="CSV file (default: stdout)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except ZeroMass as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DOMAIN
    except (InputError, FuzzyPlacerError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
