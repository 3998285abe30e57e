import argparse
import json
import sys
from typing import List, Optional, Tuple

from pydantic import ValidationError

from app import __version__
from app.config import (
    DEFAULT_ALPHA,
    DEFAULT_CLASSIFY_DEPTH,
    DEFAULT_CONTROL_DEPTH,
    DEFAULT_EPSILON,
    DEFAULT_PERIOD_CAP,
    DEFAULT_SWEEP_PERIOD,
    get_default_precision,
)
from app.core.errors import CheckFailed, LabError
from app.models import RunConfig

# Import command groups with error handling
COMMAND_GROUPS = []
IMPORT_LOG: List[Tuple[str, str]] = []

try:
    from app.commands import figures
    COMMAND_GROUPS.append(figures.group)
    IMPORT_LOG.append(("SUCCESS", "Figure commands imported"))
except Exception as e:
    IMPORT_LOG.append(("ERROR", f"Error importing figure commands: {e}"))

try:
    from app.commands import checks
    COMMAND_GROUPS.append(checks.group)
    IMPORT_LOG.append(("SUCCESS", "Check commands imported"))
except Exception as e:
    IMPORT_LOG.append(("ERROR", f"Error importing check commands: {e}"))

try:
    from app.commands import acceptance
    COMMAND_GROUPS.append(acceptance.group)
    IMPORT_LOG.append(("SUCCESS", "Acceptance commands imported"))
except Exception as e:
    IMPORT_LOG.append(("ERROR", f"Error importing acceptance commands: {e}"))


def common_arguments() -> argparse.ArgumentParser:
    """Flags shared by every subcommand"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--alpha", default=DEFAULT_ALPHA, help="gold2, silver, surd:a,b,c,d, cf:a0,a1,(tail) or a decimal")
    parser.add_argument("--precision", type=int, default=get_default_precision(), help="Working precision in bits")
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    exponent = parser.add_mutually_exclusive_group()
    exponent.add_argument("--c", type=float, default=None, help="Exponent of Herman's cocycle")
    exponent.add_argument("--gamma", type=float, default=None, help="Herman's gamma (> 1)")
    parser.add_argument("--family", choices=["pure", "stress"], default="stress")
    parser.add_argument("--modulated", choices=["yes", "no"], default="yes", help="'no' builds the unmodulated precursor")
    parser.add_argument("--depth", type=int, default=DEFAULT_CONTROL_DEPTH, help="Control-table depth (gap rows for 'gaps')")
    parser.add_argument("--classify-depth", type=int, default=DEFAULT_CLASSIFY_DEPTH)
    parser.add_argument("--period-max", type=int, default=DEFAULT_SWEEP_PERIOD)
    parser.add_argument("--period-cap", type=int, default=DEFAULT_PERIOD_CAP)
    parser.add_argument("--iters", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--verbose", action="store_true")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sturmlab", description="Sturmian cocycle laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_arguments()]
    for group in COMMAND_GROUPS:
        group.include(subparsers, parents)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        alpha=args.alpha,
        precision=args.precision,
        epsilon=args.epsilon,
        c=args.c,
        gamma=args.gamma,
        family=args.family,
        modulated=args.modulated == "yes",
        depth=args.depth,
        classify_depth=args.classify_depth,
        period_max=args.period_max,
        period_cap=args.period_cap,
        iters=args.iters,
        samples=args.samples,
        seed=args.seed,
        workers=args.workers,
        out=args.out,
        format=args.format,
    )


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, validate the configuration and dispatch to a command

    Returns:
        int: 0 on success, 1 for a failed check or numerical error, 2 for an
        invalid configuration
    """
    args = build_parser().parse_args(argv)
    if args.verbose:
        for status, message in IMPORT_LOG:
            print(f"{status}: {message}", file=sys.stderr)

    try:
        config = build_config(args)
    except ValidationError as e:
        failure = CheckFailed(
            "invalid-config",
            "; ".join(error["msg"] for error in e.errors()),
            {"errors": [{"loc": list(error["loc"]), "msg": error["msg"]} for error in e.errors()]},
        )
        print(json.dumps(failure.to_record()), file=sys.stderr)
        return 2

    try:
        return args.handler(config, args)
    except CheckFailed as e:
        print(f"[Main] ERROR: check {e.check} failed: {e}", file=sys.stderr)
        print(json.dumps(e.to_record(), default=str), file=sys.stderr)
        return 1
    except LabError as e:
        print(f"[Main] ERROR: {type(e).__name__}: {e}", file=sys.stderr)
        failure = CheckFailed("numerical-error", str(e), {"error": type(e).__name__})
        print(json.dumps(failure.to_record()), file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
