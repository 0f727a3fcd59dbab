"""Command-line entry point.

    sslaplace {solve,compare,calibration-scan,convergence} --config run.json
              [--out-dir DIR] [--threads N] [--verbose]

Exit codes: 0 success, 1 configuration error, 2 solver error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .. import _sums
from .commands import SolverFailure, cmd_calibration_scan, cmd_compare, cmd_convergence, cmd_solve
from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

COMMANDS = {
    "solve": cmd_solve,
    "compare": cmd_compare,
    "calibration-scan": cmd_calibration_scan,
    "convergence": cmd_convergence,
}

log = logging.getLogger("sslaplace")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sslaplace", description="Singular-source and BEM solvers for the Dirichlet-Laplace problem")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON problem configuration (schema 1)")
        p.add_argument("--out-dir", default=None, help="output directory (default: config out_dir or ./out)")
        p.add_argument("--threads", type=int, default=0, help="worker threads for point evaluation, 0 = auto")
        p.add_argument("--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 0:
        print("sslaplace: error: --threads must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    _sums.set_threads(args.threads)
    try:
        cfg = load_config(args.config)
        out_dir = args.out_dir or cfg.out_dir or "out"
        result = COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        log.debug("solver failure", exc_info=True)
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    log.info("%s finished: %s", args.command, type(result).__name__)
    print(f"{args.command}: wrote results to {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
