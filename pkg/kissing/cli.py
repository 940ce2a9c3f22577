import argparse
import dataclasses
import logging

from rich.console import Console
from rich.logging import RichHandler

from .commands import run_command
from .config import load_config, save_config
from .types import CliArgs, GeomCheck
from .version import get_version


def _support(value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {value!r}"
        ) from None


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="Log progress to stderr (-vv for debug output)",
    )
    common.add_argument(
        "--config", help="JSON file with tolerances and defaults", default=None
    )
    common.add_argument(
        "--save-config",
        help="Write the effective configuration to this path",
        default=None,
    )
    common.add_argument(
        "--workers",
        type=int,
        help="Worker processes for claim checks and sampling (results do not depend on it)",
        default=None,
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="kissing",
        description="kissing - exact verification of the 3D kissing number bound and Delsarte LP bounds",
    )
    parser.add_argument("--version", action="version", version=f"{get_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser(
        "verify", parents=[common], help="Check every claim and write a certificate"
    )
    verify.add_argument("--out", "-o", help="Certificate JSON path", default=None)
    verify.add_argument(
        "--function", "-f", help="Expansion file to verify instead of the built-in f"
    )
    verify.add_argument(
        "--threshold", help="Per-point sum threshold (default 123/100)", default=None
    )
    verify.add_argument(
        "--negate",
        action="append",
        type=int,
        default=[],
        help="Negate the Gegenbauer coefficient c_K (fault injection, repeatable)",
    )
    verify.add_argument(
        "--compare", help="Fail unless the certificate equals this file byte for byte"
    )
    verify.add_argument(
        "--precision-bits",
        type=int,
        default=None,
        help="Enclose irrational endpoints to width 2**-BITS",
    )

    bound = sub.add_parser(
        "bound", parents=[common], help="Certified classical Delsarte LP bound"
    )
    bound.add_argument("--dim", "-d", type=int, default=3)
    bound.add_argument("--cos-theta", default="1/2")
    bound.add_argument("--max-degree", type=int, default=9)
    bound.add_argument("--grid", type=int, default=None, help="Uniform grid size")
    bound.add_argument("--refine-rounds", type=int, default=None)
    bound.add_argument("--dump", help="Write the final LP and solution here")

    search = sub.add_parser(
        "search", parents=[common], help="Maximize c0 under the case-analysis constraints"
    )
    search.add_argument(
        "--support", type=_support, default=[0, 1, 2, 3, 4, 5, 9], help="e.g. 0,1,2,3,4,5,9"
    )
    search.add_argument("--threshold", default=None)
    search.add_argument(
        "--grid", type=int, default=None, help="Chebyshev nodes per constraint family"
    )
    search.add_argument("--refine-rounds", type=int, default=None)
    search.add_argument("--out", "-o", help="Expansion file path (default stdout)")

    evaluate = sub.add_parser("eval", parents=[common], help="Exact value f(t)")
    evaluate.add_argument("--t", required=True, help="Rational in [-1, 1], e.g. --t=-1/2")
    evaluate.add_argument("--function", "-f", default=None)

    plot = sub.add_parser("plot", parents=[common], help="Plot data for f")
    plot.add_argument("--from", dest="plot_from", default="-1")
    plot.add_argument("--to", dest="plot_to", default="1/2")
    plot.add_argument("--samples", type=int, default=500)
    plot.add_argument("--format", dest="plot_format", choices=["csv", "svg"], default="csv")
    plot.add_argument("--out", "-o", default=None)
    plot.add_argument("--function", "-f", default=None)

    geom = sub.add_parser("geom", parents=[common], help="Geometry checks")
    geom.add_argument("--check", required=True, choices=[c.value for c in GeomCheck])
    geom.add_argument("--trials", type=int, default=None)
    geom.add_argument("--seed", type=int, default=None)
    geom.add_argument("--n-points", type=int, default=12)
    geom.add_argument("--threshold", default=None)
    geom.add_argument("--function", "-f", default=None)
    geom.add_argument("--out", "-o", default=None)
    return parser


def parse_args(argv=None) -> CliArgs:
    """Parse CLI arguments into a CliArgs object.

    Raises:
        SystemExit: On invalid arguments (exit code 2).
    """
    args = build_parser().parse_args(argv)
    known = {f.name for f in dataclasses.fields(CliArgs)}
    return CliArgs(**{k: v for k, v in vars(args).items() if k in known})


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def main(argv=None) -> int:
    cli_args = parse_args(argv)
    _setup_logging(cli_args.verbose)

    config = load_config(cli_args.config)
    if cli_args.workers is not None:
        config = dataclasses.replace(config, workers=max(1, cli_args.workers))
    if cli_args.save_config:
        save_config(config, cli_args.save_config)

    console = Console(highlight=False, markup=False, emoji=False, soft_wrap=True)
    outcome = run_command(cli_args, config, console)
    return outcome.exit_code
