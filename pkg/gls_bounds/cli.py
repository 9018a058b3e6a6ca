"""The gls-bounds command line."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Sequence

from .config import COMMANDS, resolve_config
from .controller import BoundsController
from .exceptions import ConfigError, GLSBoundsError
from .models.constants import ExitCode

logger = logging.getLogger(__name__)

LOG_FORMAT = "[gls_bounds] %(levelname)s: %(message)s"
NON_CONFIG_ARGUMENTS = ("command", "config", "verbose", "quiet")

COMMAND_HELP = {
    "moments": "tabulate p -> |X|_p for a model",
    "glsnorm": "compute the GLS norm of a model for a generating function",
    "antinorm": "compute the anti-norm of a model for a generating function",
    "theta": "tabulate theta(p, q) in closed form and numerically",
    "bound": "lower bound the anti-norm of a sum from its summands' anti-norms",
    "tails": "fit a tail envelope to a normalized sum and compare it with Monte Carlo",
    "verify": "run the Monte Carlo verification suite",
}


class ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser that reports usage errors as ConfigError, keeping exit code 2 for violations."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def global_arguments() -> ArgumentParser:
    """The flags shared by every subcommand."""
    parser = ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, help="INI config file")
    parser.add_argument("--output", help="write the result table here instead of stdout")
    parser.add_argument("--plot-dir", dest="plot_dir", help="write plot-ready CSVs here")
    parser.add_argument("--workers", type=int, help="worker threads for sampling")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--count", type=int, help="Monte Carlo sample count")
    parser.add_argument("--tail-count", dest="tail_count", type=int, help="sample count for tail frequencies")
    parser.add_argument("--history", help="sqlite database that keeps verification reports")
    parser.add_argument("--quad-epsabs", dest="quad_epsabs", type=float, help="quadrature absolute tolerance")
    parser.add_argument("--quad-epsrel", dest="quad_epsrel", type=float, help="quadrature relative tolerance")
    parser.add_argument("--bisection-tol", dest="bisection_tol", type=float, help="B(phi) bisection tolerance")

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    return parser


def add_model_arguments(parser: ArgumentParser, psi: bool) -> None:
    """Adds the model flags, and the psi flags when the command uses a generating function."""
    parser.add_argument("--model", help="model spec, for example gaussian:sigma=2 or file:data.txt")
    parser.add_argument("--p-grid", dest="p_grid", help="p-grid spec: geom:lo,hi,N, range:lo,hi,step or a list")
    if psi:
        parser.add_argument("--psi", help="generating function spec, for example power:m=2 or file:psi.json")


def build_parser() -> ArgumentParser:
    """The gls-bounds argument parser."""
    parser = ArgumentParser(
        prog="gls-bounds",
        description="Moment norms, anti-norms and tail bounds of random variables.",
    )
    shared = [global_arguments()]
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    subparsers = {
        name: commands.add_parser(name, parents=shared, help=COMMAND_HELP[name])
        for name in COMMANDS
    }

    add_model_arguments(subparsers["moments"], psi=False)
    add_model_arguments(subparsers["glsnorm"], psi=True)
    add_model_arguments(subparsers["antinorm"], psi=True)
    subparsers["antinorm"].add_argument("--p-range", dest="p_range", help="search range lo,hi")
    subparsers["antinorm"].add_argument(
        "--widen", action="store_true", default=None, help="search from p = 1 instead of p = 2"
    )

    subparsers["theta"].add_argument("--p", help="comma separated exponents p")
    subparsers["theta"].add_argument("--q", help="comma separated exponents q")

    subparsers["bound"].add_argument("--v", help="comma separated anti-norms of the summands")
    subparsers["bound"].add_argument("--b", help="upper endpoint of the generating function's domain")
    subparsers["bound"].add_argument("--p", help="comma separated exponents, inf allowed")
    subparsers["bound"].add_argument("--p-grid", dest="p_grid", help="p-grid of the plotted bound curve")

    subparsers["tails"].add_argument("--model", help="model spec of the summands")
    subparsers["tails"].add_argument("--n", type=int, help="number of summands")
    subparsers["tails"].add_argument("--family", help="subgaussian, weibull or weibull:m=M")
    subparsers["tails"].add_argument("--u-grid", dest="u_grid", help="u-grid spec")
    return parser


def configure_logging(verbose: bool, quiet: bool) -> None:
    """Sends log records to stderr at the requested level."""
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    """Runs gls-bounds.

    Args:
        argv: Arguments without the program name, default sys.argv.

    Returns:
        The exit code.
    """
    try:
        arguments = build_parser().parse_args(argv)
    except ConfigError as error:
        sys.stderr.write(f"gls-bounds: {error}\n")
        return ExitCode.ERROR.value

    configure_logging(arguments.verbose, arguments.quiet)
    flags = {
        name: value
        for name, value in vars(arguments).items()
        if name not in NON_CONFIG_ARGUMENTS
    }

    try:
        config = resolve_config(arguments.command, flags, arguments.config)
        return BoundsController(config).run().value
    except (GLSBoundsError, ValueError, OSError) as error:
        logger.error("%s", error)
        logger.debug("Failure details", exc_info=True)
        return ExitCode.ERROR.value
