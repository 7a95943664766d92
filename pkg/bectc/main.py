import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from bectc import __version__
from bectc.config import (
    AnisoscanOptions,
    Fig1Options,
    Fig2Options,
    SolveOptions,
    ValidityOptions,
    load_config_file,
    merge_options,
    settings,
)
from bectc.exceptions import BecError, ConfigError, DomainError
from bectc.models import GasState, SweepTable
from bectc.services.exact import solve_fugacity
from bectc.services.output import TableWriter
from bectc.services.sweeps import SweepService
from bectc.services.trap import make_trap
from bectc.services.validity import check_validity, render_report
from bectc.utils import format_number

logger = logging.getLogger("bectc")

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", default=None, help="csv or json for sweeps; text or json for validity/solve")
    common.add_argument("--out", default=None, metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--config", default=None, metavar="PATH", help="key = value file with option defaults")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default: BEC_LOG_LEVEL)")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--overlay", default=None, metavar="PATH", help="reference CSV merged on the first column")

    trap = argparse.ArgumentParser(add_help=False)
    trap.add_argument("--shape", default=None, help="isotropic, disk or cigar")
    trap.add_argument("--s", type=float, default=None, help="anisotropy parameter (>= 1)")
    trap.add_argument("--n", type=float, default=None, help="particle number")

    parser = argparse.ArgumentParser(
        prog="bectc",
        description="Condensation temperatures of a finite ideal Bose gas in harmonic traps",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    fig1 = subparsers.add_parser("fig1", parents=[common, sweep], help="rescaled Tc vs log10 N, isotropic trap")
    fig1.add_argument("--n-min", type=float, default=None)
    fig1.add_argument("--n-max", type=float, default=None)
    fig1.add_argument("--points", type=int, default=None)
    fig1.add_argument("--unsafe", action="store_true", default=None, help="allow n_min below 1e4")

    fig2 = subparsers.add_parser("fig2", parents=[common, sweep], help="condensate fraction vs T/Tc0")
    fig2.add_argument("--n", type=float, nargs="+", default=None, help="one or more particle numbers")
    fig2.add_argument("--t-points", type=int, default=None)

    aniso = subparsers.add_parser("anisoscan", parents=[common, sweep], help="first-order Tc vs T_0.1%% over s")
    aniso.add_argument("--shape", default=None, help="disk or cigar")
    aniso.add_argument("--n", type=float, default=None)
    aniso.add_argument("--s-max-scan", type=float, default=None, help="largest s (default: 3x validity boundary)")
    aniso.add_argument("--points", type=int, default=None)
    aniso.add_argument("--threshold", type=float, default=None)

    validity = subparsers.add_parser("validity", parents=[common, trap], help="continuum-description check")
    validity.add_argument("--threshold", type=float, default=None)

    solve = subparsers.add_parser("solve", parents=[common, trap], help="equilibrium state at one temperature")
    solve.add_argument("--t", type=float, default=None, help="temperature in units of hbar omega / k_B")

    return parser


def run_fig1(options: Fig1Options) -> SweepTable:
    return SweepService().fig1(options.n_min, options.n_max, options.points, options.unsafe)


def run_fig2(options: Fig2Options) -> SweepTable:
    return SweepService().fig2(options.n, options.t_points)


def run_anisoscan(options: AnisoscanOptions) -> SweepTable:
    return SweepService().anisoscan(options.shape, options.n, options.s_max_scan, options.points, options.threshold)


def run_validity(options: ValidityOptions) -> str:
    report = check_validity(make_trap(options.shape, options.s), options.n, options.threshold)
    if options.format == "json":
        return report.model_dump_json(indent=2) + "\n"
    return render_report(report)


def run_solve(options: SolveOptions) -> str:
    state = solve_fugacity(make_trap(options.shape, options.s), options.n, options.t)
    if options.format == "json":
        return state.model_dump_json(indent=2) + "\n"
    return render_state(state)


def render_state(state: GasState) -> str:
    digits = settings.SIGNIFICANT_DIGITS
    lines = [
        f"shape: {state.trap.shape.value}",
        f"s: {format_number(state.trap.s, digits)}",
        f"n_atoms: {format_number(state.n_atoms, digits)}",
        f"t: {format_number(state.t, digits)}",
        f"z: {format_number(state.z, digits)}",
        f"log_z: {format_number(state.log_z, digits)}",
        f"n0: {format_number(state.n0, digits)}",
        f"f0: {format_number(state.f0, digits)}",
        f"residual: {format_number(state.residual, digits)}",
    ]
    return "\n".join(lines) + "\n"


COMMANDS = {
    "fig1": (Fig1Options, run_fig1),
    "fig2": (Fig2Options, run_fig2),
    "anisoscan": (AnisoscanOptions, run_anisoscan),
    "validity": (ValidityOptions, run_validity),
    "solve": (SolveOptions, run_solve),
}


def configure_logging(level: Optional[str]):
    name = (level or settings.LOG_LEVEL).upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level: {level}")
    logging.basicConfig(
        level=numeric,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}

    try:
        configure_logging(args.log_level)
        start_time = time.time()
        logger.info(f"bectc {__version__}: {args.command}")

        model, handler = COMMANDS[args.command]
        file_values = load_config_file(args.config) if args.config else {}
        options = merge_options(model, file_values, flags)

        result = handler(options)
        writer = TableWriter()
        if isinstance(result, SweepTable):
            if options.overlay:
                result = writer.merge_overlay(result, options.overlay)
            text = writer.render(result, options.format)
        else:
            text = result
        writer.emit(text, options.out)

        logger.info(f"{args.command} finished in {time.time() - start_time:.2f}s")
        return EXIT_OK

    except ValidationError as e:
        message = "; ".join(_describe_validation(err) for err in e.errors())
        logger.error(f"Invalid options for {args.command}: {message}")
        print(f"bectc {args.command}: invalid options: {message}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DomainError) as e:
        logger.error(f"Usage error: {str(e)}")
        print(f"bectc {args.command}: {str(e)}", file=sys.stderr)
        return EXIT_USAGE
    except BecError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        print(f"bectc {args.command}: {str(e)}", file=sys.stderr)
        return EXIT_COMPUTATION


def _describe_validation(error: Dict[str, Any]) -> str:
    location = ".".join(str(part) for part in error.get("loc", ())) or "options"
    return f"{location}: {error.get('msg', 'invalid value')}"


if __name__ == "__main__":
    sys.exit(main())
