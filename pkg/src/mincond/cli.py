"""
Command line: ``mincond solve`` runs an experiment, ``mincond verify``
checks every algorithm against the exhaustive optimum of a small graph.

Exit codes: 0 success, 1 configuration or I/O error, 2 an algorithm
reported a value below the exhaustive optimum.
"""

import argparse
import logging
import sys
from typing import Optional

from mincond import __version__
from mincond.core.bench import ALGORITHMS, ExperimentConfig, run_experiment, verify_small
from mincond.core.budget import DEFAULT_STAGNATION_LIMIT
from mincond.core.engine import format_decimal
from mincond.core.errors import MincondError
from mincond.core.genetic import DEFAULT_POP_SIZE, DEFAULT_TOURNAMENT_SIZE
from mincond.core.local_search import DEFAULT_MOVE_MIX
from mincond.core.memetic import DEFAULT_LS_LENGTH

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors are configuration errors: exit 1, keeping 2 for violations."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="mincond", description="Minimum-conductance graph partitioning")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="run an algorithm on an edge list")
    solve.add_argument("--input", required=True, help="whitespace-separated edge list")
    solve.add_argument("--lcc", action="store_true", help="keep only the largest connected component")
    solve.add_argument("--algorithm", required=True, choices=list(ALGORITHMS))
    solve.add_argument("--runs", type=int, default=1)
    limit = solve.add_mutually_exclusive_group(required=True)
    limit.add_argument("--time-limit", type=float, help="seconds per run")
    limit.add_argument("--iterations", type=int, help="evaluations per run (deterministic)")
    solve.add_argument("--seed", type=int, default=0, help="run i uses seed + i")
    solve.add_argument("--pop-size", type=int, default=DEFAULT_POP_SIZE)
    solve.add_argument("--tournament", type=int, default=DEFAULT_TOURNAMENT_SIZE)
    solve.add_argument("--ls-length", type=int, default=DEFAULT_LS_LENGTH)
    solve.add_argument("--stagnation", type=int, default=DEFAULT_STAGNATION_LIMIT)
    solve.add_argument("--move-mix", type=float, default=DEFAULT_MOVE_MIX, help="probability of testing a flip")
    solve.add_argument("--ps-floor", type=float, default=None)
    solve.add_argument("--workers", type=int, default=None, help="overrides CONDUCTANCE_THREADS")
    solve.add_argument("--out-summary", default=None)
    solve.add_argument("--out-runs", default=None)
    solve.add_argument("--out-partition", default=None)

    verify = commands.add_parser("verify", help="compare every algorithm with the exhaustive optimum")
    verify.add_argument("--input", required=True)
    verify.add_argument("--seed", type=int, default=0)
    return parser


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        instance_path=args.input,
        algorithm=args.algorithm,
        runs=args.runs,
        time_limit=args.time_limit,
        iterations=args.iterations,
        base_seed=args.seed,
        pop_size=args.pop_size,
        tournament=args.tournament,
        ls_length=args.ls_length,
        stagnation=args.stagnation,
        move_mix=args.move_mix,
        ps_floor=args.ps_floor,
        lcc=args.lcc,
        out_summary=args.out_summary,
        out_runs=args.out_runs,
        out_partition=args.out_partition,
        workers=args.workers,
    )


def solve(args: argparse.Namespace) -> int:
    _, summary = run_experiment(config_from_args(args))
    print(f"{summary.graph_name},{summary.algorithm},{summary.min_phi.display()},"
          f"{format_decimal(summary.mean_phi)},{summary.success_rate}")
    return EXIT_OK


def verify(args: argparse.Namespace) -> int:
    report = verify_small(args.input, seed=args.seed)
    print(f"optimum {report.optimum.display()}")
    for entry in report.entries:
        status = "VIOLATION" if entry.violation else "ok" if entry.reached else "suboptimal"
        print(f"{entry.algorithm:8} {entry.phi.display()} {status}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        if args.command == "solve":
            return solve(args)
        return verify(args)
    except (MincondError, OSError) as e:
        print(f"mincond: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
