# Global imports
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List

from pydantic import ValidationError

from phonon_diffusion import __version__
from phonon_diffusion.helpers import set_logger
from phonon_diffusion.service import (
    CRITERIA,
    EXIT_ACCEPTANCE,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigFileError,
    ExperimentError,
    ExperimentResult,
    RunConfig,
    build_config,
    read_config_file,
    run_kappa,
    run_kernel,
    run_simulate,
    run_spectrum,
    run_symbols,
    run_verify,
)

COMMANDS: Dict[str, Callable[[RunConfig], ExperimentResult]] = {
    "kernel": run_kernel,
    "spectrum": run_spectrum,
    "symbols": run_symbols,
    "kappa": run_kappa,
    "simulate": run_simulate,
    "verify": run_verify,
}

# argparse destinations that are not RunConfig fields
_CLI_ONLY = {"command", "config", "debug", "log_file"}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file", type=str)
    common.add_argument("--out", help="Output directory", type=str)
    common.add_argument(
        "--cache-dir",
        dest="cache_dir",
        help="Kernel cache directory (default: $PHONON_CACHE_DIR or ./.phonon_cache)",
        type=str,
    )
    common.add_argument("--n", help="Wave-number grid size (even, >= 16)", type=int)
    common.add_argument("--quad-tol", dest="quad_tol", help="Quadrature tolerance", type=float)
    common.add_argument("--workers", help="Worker threads", type=int)
    common.add_argument(
        "--debug",
        help="set the logging level to debug",
        required=False,
        default=False,
        action="store_true",
    )
    common.add_argument("--log-file", dest="log_file", help="Also log to this file", type=str)
    return common


def get_parser() -> argparse.ArgumentParser:

    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="phonon-diffusion",
        description=(
            "Linearized phonon Boltzmann operator of the FPU chain and its"
            " fractional diffusion limit: kernel tables, spectra, symbols,"
            " simulations and acceptance checks"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    kernel = subparsers.add_parser("kernel", parents=[common], help="Assemble and cache K")
    kernel.add_argument(
        "--force",
        help="Rebuild even if a cache file exists",
        default=None,
        action="store_true",
    )

    subparsers.add_parser("spectrum", parents=[common], help="Spectral report of L")

    symbols = subparsers.add_parser(
        "symbols", parents=[common], help="Laplace-Fourier symbols a1, a2, a3"
    )
    symbols.add_argument("--eps", help="Comma-separated eps values", type=str)
    symbols.add_argument("--p", help="Laplace variable", type=float)
    symbols.add_argument("--xi", help="Comma-separated Fourier variables", type=str)

    subparsers.add_parser("kappa", parents=[common], help="kappa1, kappa2, kappa3 and kappa")

    simulate = subparsers.add_parser(
        "simulate", parents=[common], help="Kinetic simulation over eps values"
    )
    simulate.add_argument("--eps", help="Comma-separated eps values", type=str)
    simulate.add_argument("--alpha", help="Time scaling exponent", type=float)
    simulate.add_argument("--T-bar", dest="T_bar", help="Background temperature", type=float)
    simulate.add_argument("--box-length", dest="box_length", type=float)
    simulate.add_argument("--modes", help="Number of x Fourier modes", type=int)
    simulate.add_argument("--t-end", dest="t_end", type=float)
    simulate.add_argument("--steps", type=int)
    simulate.add_argument(
        "--scheme", choices=["crank_nicolson", "implicit_euler"], type=str
    )
    simulate.add_argument("--record-every", dest="record_every", type=int)
    simulate.add_argument(
        "--enforce-dissipation",
        dest="enforce_dissipation",
        help="Clip positive eigenvalues of the discrete L",
        default=None,
        action="store_true",
    )

    verify = subparsers.add_parser(
        "verify", parents=[common], help="Run the acceptance criteria"
    )
    verify.add_argument(
        "--only",
        help=f"Comma-separated subset of: {', '.join(CRITERIA)}",
        type=str,
    )

    return parser


def main(argv: List[str] = sys.argv[1:]) -> int:
    print(f"-- phonon-diffusion v{__version__} --")

    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code
    arguments: Dict[str, Any] = vars(args)

    set_logger(
        log_file=arguments["log_file"],
        log_level=logging.DEBUG if arguments["debug"] else logging.INFO,
    )

    try:
        file_values = read_config_file(arguments["config"]) if arguments["config"] else {}
        config = build_config(
            file_values,
            {key: value for key, value in arguments.items() if key not in _CLI_ONLY},
        )
    except ConfigFileError as err:
        logging.error(str(err))
        return EXIT_IO
    except ValidationError as err:
        logging.error(f"Invalid configuration:\n{err}")
        return EXIT_NUMERICAL

    command = arguments["command"]
    try:
        result = COMMANDS[command](config)
    except ExperimentError as err:
        logging.error(str(err))
        return err.exit_code
    except OSError as err:
        logging.error(f"I/O failure: {err}")
        return EXIT_IO

    for key, value in result.summary.items():
        logging.info(f"{key:>20} : {value:.10g}")
    if command == "verify" and not result.summary.get("passed"):
        logging.error("Acceptance suite failed")
        return EXIT_ACCEPTANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
