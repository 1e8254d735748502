# Global imports
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum, auto
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from phonon_diffusion.helpers import write_csv, write_manifest
from phonon_diffusion.kernel.kernel_cache import (
    KernelCacheError,
    cache_filename,
    default_cache_dir,
    load_table,
    save_table,
)
from phonon_diffusion.kernel.parameters_kernel import KernelError, KernelTable, WaveGrid
from phonon_diffusion.kernel.phonon_kernel import VProfile, assemble_kernel
from phonon_diffusion.linear.linop import DiscreteOperator, InvalidTableError, spectral_report
from phonon_diffusion.limit.kinetic_sim import (
    MomentTrace,
    StiffnessError,
    SweepReport,
    run_epsilon_sweep,
)
from phonon_diffusion.limit.symbols import (
    KAPPA_EXPONENT,
    KappaSet,
    compute_kappas,
    kappa_integral,
    limit_symbols,
    mellin_closed_form,
    sample_symbols,
)
from phonon_diffusion.service.config import RunConfig

SYMBOLS_HEADER = [
    "eps", "p", "xi",
    "re_a1", "im_a1", "re_a2", "im_a2", "re_a3", "im_a3",
    "lim_a1", "lim_a2", "lim_a3",
]  # fmt: skip
TRACE_HEADER = [
    "t", "j", "xi", "re_T", "im_T", "re_S", "im_S", "h_norm", "l2_norm", "r1", "r2",
]  # fmt: skip
SWEEP_HEADER = [
    "eps", "limit_error", "slaving_error_minus", "slaving_error_plus",
    "max_norm_ratio", "mean_drift", "mean_r1", "mean_r2",
]  # fmt: skip

EXIT_OK = 0
EXIT_IO = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


class ExperimentStage(Enum):
    LOADING_KERNEL = auto()
    BUILDING_KERNEL = auto()
    SPECTRUM = auto()
    SYMBOLS = auto()
    KAPPA = auto()
    SIMULATING = auto()
    VERIFYING = auto()
    COMPLETED = auto()


ProgressCallback = Callable[[ExperimentStage, Optional[str]], None]


class ExperimentError(RuntimeError):
    """Raised when an experiment cannot complete; carries the process exit code."""

    def __init__(self, message: str, exit_code: int = EXIT_NUMERICAL) -> None:
        super().__init__(message)
        self.exit_code = exit_code


@dataclass
class ExperimentResult:
    outputs: List[Path] = field(default_factory=list)
    summary: Dict[str, float] = field(default_factory=dict)


def notify_progress(
    progress_cb: Optional[ProgressCallback], stage: ExperimentStage, message: str
) -> None:
    logging.debug(f"{stage.name}: {message}")
    if progress_cb:
        progress_cb(stage, message)


def finish_experiment(
    config: RunConfig, outputs: List[Path], summary: Dict[str, float]
) -> ExperimentResult:
    write_manifest(Path(config.out), outputs, config.inputs())
    return ExperimentResult(outputs=outputs, summary=summary)


# ---------------- KERNEL TABLES ----------------
def cache_path(config: RunConfig, n: Optional[int] = None) -> Path:
    size = config.n if n is None else n
    return default_cache_dir(config.cache_dir) / cache_filename(size, config.quad_tol)


def obtain_table(
    config: RunConfig,
    n: Optional[int] = None,
    force: bool = False,
    progress_cb: Optional[ProgressCallback] = None,
) -> KernelTable:
    """Load the cached kernel table for grid size n, assembling it when missing."""
    size = config.n if n is None else n
    path = cache_path(config, size)
    if path.is_file() and not force:
        notify_progress(progress_cb, ExperimentStage.LOADING_KERNEL, str(path))
        try:
            table = load_table(path)
        except KernelCacheError as err:
            raise ExperimentError(f"Kernel cache {path} is unusable: {err}", EXIT_IO) from err
        if table.n != size or table.quad_tol != config.quad_tol:
            raise ExperimentError(
                f"Kernel cache {path} holds n={table.n}, quad_tol={table.quad_tol:.0e}",
                EXIT_IO,
            )
        return table

    notify_progress(progress_cb, ExperimentStage.BUILDING_KERNEL, f"n={size}")
    try:
        table = assemble_kernel(WaveGrid(size), config.quad_tol, config.workers)
    except (KernelError, ValueError) as err:
        raise ExperimentError(f"Kernel assembly failed: {err}", EXIT_NUMERICAL) from err
    try:
        save_table(table, path)
    except OSError as err:
        raise ExperimentError(f"Cannot write kernel cache {path}: {err}", EXIT_IO) from err
    return table


def run_kernel(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    started = time.perf_counter()
    table = obtain_table(config, force=config.force, progress_cb=progress_cb)
    elapsed = time.perf_counter() - started
    nodes = np.asarray(table.grid.nodes)
    ratio = table.V / np.abs(np.sin(np.pi * nodes)) ** (5.0 / 3.0)
    profile = write_csv(
        Path(config.out) / f"kernel_profile_n{table.n}.csv",
        ["k", "V", "V_over_sin53"],
        zip(nodes, table.V, ratio),
    )
    summary = {
        "n": float(table.n),
        "v0": table.v0,
        "c1": table.c1,
        "c2": table.c2,
        "seconds": elapsed,
    }
    logging.info(
        f"n={table.n} v0={table.v0:.10g} c1={table.c1:.10g} c2={table.c2:.10g}"
        f" time={elapsed:.1f}s cache={cache_path(config)}"
    )
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "kernel")
    return finish_experiment(config, [profile], summary)


# ---------------- SPECTRUM ----------------
def run_spectrum(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    table = obtain_table(config, progress_cb=progress_cb)
    notify_progress(progress_cb, ExperimentStage.SPECTRUM, f"n={table.n}")
    try:
        report = spectral_report(DiscreteOperator(table))
    except (InvalidTableError, ValueError) as err:
        raise ExperimentError(f"Spectral report failed: {err}", EXIT_NUMERICAL) from err
    out_dir = Path(config.out)
    eigen_path = write_csv(
        out_dir / f"spectrum_n{table.n}.csv",
        ["index", "eigenvalue"],
        enumerate(report.eigenvalues),
    )
    summary = {
        "zero_count": float(report.zero_count),
        "enriched": float(report.enriched),
        "c0": report.c0,
        "coercivity": report.coercivity,
        "residual_one": report.residual_one,
        "residual_omega_inv": report.residual_omega_inv,
    }
    summary_path = write_csv(
        out_dir / f"spectrum_summary_n{table.n}.csv",
        ["quantity", "value"],
        summary.items(),
    )
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "spectrum")
    return finish_experiment(config, [eigen_path, summary_path], summary)


# ---------------- SYMBOLS AND KAPPA ----------------
def run_symbols(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    table = obtain_table(config, progress_cb=progress_cb)
    profile = VProfile(table)
    kappas = compute_kappas(table.v0)
    rows = []
    for eps in config.eps:
        for xi in config.xi:
            notify_progress(progress_cb, ExperimentStage.SYMBOLS, f"eps={eps} xi={xi}")
            try:
                sample = sample_symbols(profile, eps, config.p, xi, config.quad_tol)
            except (KernelError, ValueError) as err:
                raise ExperimentError(
                    f"Symbol evaluation failed at eps={eps}, xi={xi}: {err}", EXIT_NUMERICAL
                ) from err
            limits = limit_symbols(kappas, config.p, xi)
            rows.append(
                [
                    eps, config.p, xi,
                    sample.a1.real, sample.a1.imag,
                    sample.a2.real, sample.a2.imag,
                    sample.a3.real, sample.a3.imag,
                    *limits,
                ]  # fmt: skip
            )
    path = write_csv(Path(config.out) / "symbols.csv", SYMBOLS_HEADER, rows)
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "symbols")
    return finish_experiment(config, [path], {"rows": float(len(rows))})


def kappa_summary(kappas: KappaSet) -> Dict[str, float]:
    return {
        "v0": kappas.v0,
        "kappa1": kappas.kappa1,
        "kappa2": kappas.kappa2,
        "kappa3": kappas.kappa3,
        "kappa_eff": kappas.kappa_eff,
        "holder_ratio": kappas.holder_ratio,
        "mellin_plus": kappa_integral(KAPPA_EXPONENT),
        "mellin_minus": kappa_integral(-KAPPA_EXPONENT),
        "mellin_closed_form": mellin_closed_form(KAPPA_EXPONENT),
        "kappa2_exact": 3.0 * math.pi / 5.0,
    }


def run_kappa(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    table = obtain_table(config, progress_cb=progress_cb)
    notify_progress(progress_cb, ExperimentStage.KAPPA, f"v0={table.v0:.10g}")
    try:
        summary = kappa_summary(compute_kappas(table.v0))
    except ValueError as err:
        raise ExperimentError(f"Kappa constants rejected: {err}", EXIT_NUMERICAL) from err
    path = write_csv(Path(config.out) / "kappa.csv", ["quantity", "value"], summary.items())
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "kappa")
    return finish_experiment(config, [path], summary)


# ---------------- SIMULATION ----------------
def trace_rows(trace: MomentTrace):
    for row in trace.rows:
        yield [
            row.t, row.j, row.xi,
            row.T.real, row.T.imag, row.S.real, row.S.imag,
            row.h_norm, row.l2_norm, row.r1, row.r2,
        ]  # fmt: skip


def simulate_sweep(
    config: RunConfig,
    eps_list: List[float],
    n: Optional[int] = None,
    progress_cb: Optional[ProgressCallback] = None,
) -> SweepReport:
    table = obtain_table(config, n=n, progress_cb=progress_cb)
    kappas = compute_kappas(table.v0)
    ordered = sorted(set(eps_list), reverse=True)
    notify_progress(progress_cb, ExperimentStage.SIMULATING, f"eps={ordered}")
    try:
        return run_epsilon_sweep(
            table,
            config.sim_config(ordered[0], n=table.n),
            ordered,
            kappas,
            workers=config.workers,
        )
    except (StiffnessError, InvalidTableError) as err:
        raise ExperimentError(f"Simulation rejected: {err}", EXIT_NUMERICAL) from err


def run_simulate(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    report = simulate_sweep(config, config.eps, progress_cb=progress_cb)
    out_dir = Path(config.out)
    outputs = [
        write_csv(out_dir / f"trace_eps{result.eps:g}.csv", TRACE_HEADER, trace_rows(result.trace))
        for result in report.results
    ]
    sweep_rows = [
        [
            result.eps,
            result.limit_error,
            result.slaving_errors[-1],
            result.slaving_errors[1],
            result.diagnostics.max_norm_ratio,
            result.diagnostics.mean_drift,
            result.mean_r1,
            result.mean_r2,
        ]
        for result in report.results
    ]
    outputs.append(write_csv(out_dir / "sweep.csv", SWEEP_HEADER, sweep_rows))
    summary = {"sign": float(report.sign)}
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "simulate")
    return finish_experiment(config, outputs, summary)
