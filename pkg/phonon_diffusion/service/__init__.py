"""Service-layer helpers for phonon_diffusion experiments."""

from .acceptance import CRITERIA, CriterionResult, run_verify, select_criteria
from .config import ConfigFileError, RunConfig, build_config, read_config_file
from .experiments import (
    EXIT_ACCEPTANCE,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    ExperimentError,
    ExperimentResult,
    ExperimentStage,
    ProgressCallback,
    obtain_table,
    run_kappa,
    run_kernel,
    run_simulate,
    run_spectrum,
    run_symbols,
)

__all__ = [
    "CRITERIA",
    "ConfigFileError",
    "CriterionResult",
    "EXIT_ACCEPTANCE",
    "EXIT_IO",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "ExperimentError",
    "ExperimentResult",
    "ExperimentStage",
    "ProgressCallback",
    "RunConfig",
    "build_config",
    "obtain_table",
    "read_config_file",
    "run_kappa",
    "run_kernel",
    "run_simulate",
    "run_spectrum",
    "run_symbols",
    "run_verify",
    "select_criteria",
]
