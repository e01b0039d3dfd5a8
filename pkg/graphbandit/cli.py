"""Command-line entry point: ``graphbandit <command> [options]``."""
import argparse
import dataclasses
import logging
import sys
from typing import List, Optional

from graphbandit import __version__
from graphbandit.analytics import ResultAnalytics
from graphbandit.exceptions import GraphBanditError
from graphbandit.experiment import ExperimentConfig, load_config, run_experiment
from graphbandit.generators import GENERATORS, generate_graph
from graphbandit.graph import format_edge_list, write_edge_list

logger = logging.getLogger("graphbandit")

EXIT_OK = 0
EXIT_ERROR = 1


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--repetitions", type=int, help="override the repetition count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphbandit",
        description="Best-node identification from noisy edge differences",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug details")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings only")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="write a generated graph as an edge list")
    generate.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    generate.add_argument("-n", type=int, help="node count")
    generate.add_argument("-p", type=float, help="edge probability (erdos_renyi)")
    generate.add_argument("--rings", type=int, help="rings (spider_web)")
    generate.add_argument("--nodes-per-ring", type=int, help="nodes per ring (spider_web)")
    generate.add_argument("--seed", type=int, help="seed of random generators")
    generate.add_argument("--out", help="edge-list file (stdout when omitted)")

    run = commands.add_parser("run", help="run the experiment a config describes")
    _add_run_options(run)
    curve = commands.add_parser("curve", help="budgeted error curves")
    _add_run_options(curve)
    contextual = commands.add_parser("contextual", help="contextual identification sequences")
    _add_run_options(contextual)
    return parser


def _generator_params(args) -> dict:
    names = {"n": "n", "p": "p", "rings": "rings", "nodes_per_ring": "nodes_per_ring", "seed": "seed"}
    return {param: getattr(args, attr) for attr, param in names.items()
            if getattr(args, attr) is not None}


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.repetitions is not None:
        overrides["repetitions"] = args.repetitions
    if args.out is not None:
        overrides["output"] = args.out
    if args.command in ("curve", "contextual"):
        overrides["mode"] = args.command
    return dataclasses.replace(config, **overrides) if overrides else config


def _generate(args) -> int:
    graph = generate_graph(args.kind, **_generator_params(args))
    if args.out:
        write_edge_list(graph, args.out)
        logger.info("Wrote %r to %s", graph, args.out)
    else:
        sys.stdout.write(format_edge_list(graph))
    return EXIT_OK


def _run(args) -> int:
    config = _resolve_config(args)
    outcome = run_experiment(config)
    if outcome.rows:
        for line in ResultAnalytics(outcome.rows).get_insights():
            print(line)
    for point in outcome.points:
        rate = "flagged" if point.flagged else f"{point.error_rate:.3f}"
        print(f"{point.algorithm} budget={point.budget} error={rate}")
    for role, path in sorted(outcome.paths.items()):
        print(f"{role}: {path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "generate":
            return _generate(args)
        return _run(args)
    except GraphBanditError as e:
        print(f"graphbandit: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
