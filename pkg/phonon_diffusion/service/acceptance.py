# Global imports
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from phonon_diffusion.helpers import DegenerateFitError, fit_loglog, write_csv
from phonon_diffusion.kernel.parameters_kernel import KernelError, KernelTable, WaveGrid
from phonon_diffusion.kernel.phonon_kernel import (
    VProfile,
    degeneracy_slope,
    resonance_partner,
    resonance_residual,
    three_phonon_gap,
)
from phonon_diffusion.linear.collision import (
    PhononDensity,
    calibrate_constant,
    conservation_check,
    entropy_production,
    evaluate_C,
    extra_resonance_roots,
    linearization_consistency,
    quadratic_Q,
)
from phonon_diffusion.linear.linop import (
    DiscreteOperator,
    apply_L,
    spectral_report,
    weighted_norms,
)
from phonon_diffusion.limit.kinetic_sim import SweepReport
from phonon_diffusion.limit.symbols import (
    KAPPA_EXPONENT,
    a3_lower_bound_check,
    compute_kappas,
    convergence_study,
    kappa_integral,
    mellin_closed_form,
)
from phonon_diffusion.service.config import RunConfig
from phonon_diffusion.service.experiments import (
    EXIT_NUMERICAL,
    ExperimentError,
    ExperimentResult,
    ExperimentStage,
    ProgressCallback,
    finish_experiment,
    notify_progress,
    obtain_table,
    simulate_sweep,
)

VERIFY_HEADER = ["criterion", "measured", "threshold", "pass"]
COLLISION_SAMPLE_KS = tuple(float(k) for k in WaveGrid(20).nodes + 0.011)
CONSERVATION_SIZES = (8, 16, 32)


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    measured: float
    threshold: float
    passed: bool


@dataclass
class VerifyContext:
    """Kernel tables and sweeps shared between criteria of one verify run."""

    config: RunConfig
    progress_cb: Optional[ProgressCallback] = None
    _tables: Dict[int, KernelTable] = field(default_factory=dict, init=False, repr=False)
    _sweep: Optional[SweepReport] = field(default=None, init=False, repr=False)

    def table(self, n: int) -> KernelTable:
        if n not in self._tables:
            self._tables[n] = obtain_table(self.config, n=n, progress_cb=self.progress_cb)
        return self._tables[n]

    def sweep(self) -> SweepReport:
        if self._sweep is None:
            self._sweep = simulate_sweep(
                self.config, self.config.verify_eps, progress_cb=self.progress_cb
            )
        return self._sweep


def _below(name: str, measured: float, threshold: float) -> CriterionResult:
    return CriterionResult(name, measured, threshold, bool(measured <= threshold))


def _above(name: str, measured: float, threshold: float) -> CriterionResult:
    return CriterionResult(name, measured, threshold, bool(measured >= threshold))


def refinement_sizes(coarse_n: int, fine_n: int) -> List[int]:
    """Even grid sizes n/4, n/2, n and the fine size, for order fits."""
    sizes = {2 * (coarse_n // 8), 2 * (coarse_n // 4), coarse_n, fine_n}
    return sorted(size for size in sizes if size >= 16)


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


# ---------------- CRITERIA ----------------
def check_kappa(ctx: VerifyContext) -> List[CriterionResult]:
    closed = mellin_closed_form(KAPPA_EXPONENT)
    kappa2 = 1.2 * kappa_integral(0.0)
    return [
        _below("kappa.kappa2", abs(kappa2 - 3.0 * math.pi / 5.0), 1e-10),
        _below("kappa.mellin_plus", abs(kappa_integral(KAPPA_EXPONENT) - closed), 1e-8),
        _below("kappa.mellin_minus", abs(kappa_integral(-KAPPA_EXPONENT) - closed), 1e-8),
    ]


def check_holder(ctx: VerifyContext) -> List[CriterionResult]:
    kappas = compute_kappas(ctx.table(ctx.config.verify_n[0]).v0)
    product = (36.0 / 25.0) * mellin_closed_form(KAPPA_EXPONENT) ** 2
    return [
        _below("holder.ratio", kappas.holder_ratio, 1.0 - 1e-3),
        _below("holder.product", abs(kappas.kappa1 * kappas.kappa3 - product), 1e-8),
    ]


def check_degeneracy(ctx: VerifyContext) -> List[CriterionResult]:
    coarse_n, fine_n = ctx.config.verify_n[0], ctx.config.verify_n[-1]
    coarse, fine = ctx.table(coarse_n), ctx.table(fine_n)
    dyadic = [2.0**-j for j in range(6, 11)]
    slope = degeneracy_slope(dyadic, ctx.config.quad_tol)
    spread = abs(coarse.v0 - fine.v0) / fine.v0
    return [
        _above("degeneracy.envelope_min", fine.c1, np.finfo(float).tiny),
        CriterionResult(
            "degeneracy.envelope_max", fine.c2, math.inf, bool(math.isfinite(fine.c2))
        ),
        _below("degeneracy.slope", abs(slope - 5.0 / 3.0), 0.05),
        _below("degeneracy.v0_agreement", spread, 0.01),
    ]


def check_kernel_of_L(ctx: VerifyContext) -> List[CriterionResult]:
    coarse_n, fine_n = ctx.config.verify_n[0], ctx.config.verify_n[-1]
    coarse_op = DiscreteOperator(ctx.table(coarse_n))
    fine_op = DiscreteOperator(ctx.table(fine_n))
    coarse_report = spectral_report(coarse_op)
    fine_report = spectral_report(fine_op)
    drift = abs(coarse_report.c0 - fine_report.c0) / fine_report.c0
    ones = float(np.max(np.abs(apply_L(coarse_op, np.ones(coarse_n)))))
    scale = float(np.max(coarse_op.Vdiag))

    sizes = refinement_sizes(coarse_n, fine_n)
    residuals = []
    for size in sizes:
        op = DiscreteOperator(ctx.table(size))
        residuals.append(weighted_norms(op, apply_L(op, op.omega_inv))[0])
    try:
        order = -fit_loglog(sizes, residuals)[0]
    except DegenerateFitError:
        order = math.nan
    return [
        CriterionResult(
            "kernel_of_L.zero_count",
            float(coarse_report.zero_count),
            2.0,
            coarse_report.zero_count == 2,
        ),
        CriterionResult(
            "kernel_of_L.enriched",
            float(coarse_report.enriched),
            1.0,
            coarse_report.enriched,
        ),
        _above("kernel_of_L.c0", coarse_report.c0, np.finfo(float).tiny),
        _below("kernel_of_L.c0_stability", drift, 0.02),
        _below("kernel_of_L.residual_one", ones, 1e-12 * scale),
        _above("kernel_of_L.omega_inv_order", order, 1.0),
    ]


def _random_density(coefficients: np.ndarray) -> Callable[[float], float]:
    """exp of a two-harmonic trigonometric polynomial, positive and periodic."""

    def density(k: float) -> float:
        phase = 2.0 * math.pi * k
        return math.exp(
            coefficients[0] * math.cos(phase)
            + coefficients[1] * math.sin(phase)
            + coefficients[2] * math.cos(2.0 * phase)
            + coefficients[3] * math.sin(2.0 * phase)
        )

    return density


def check_collision(ctx: VerifyContext) -> List[CriterionResult]:
    tol = ctx.config.quad_tol
    equilibrium_residual = 0.0
    for a in (0.0, 0.3, 1.0):
        for b in (0.5, 1.0, 2.0):
            W = PhononDensity.equilibrium(a, b)
            for k in COLLISION_SAMPLE_KS:
                equilibrium_residual = max(equilibrium_residual, abs(evaluate_C(W, k, tol)))

    rng = np.random.default_rng(20240611)
    grid = WaveGrid(16)
    worst_entropy = math.inf
    for _ in range(20):
        coefficients = rng.normal(scale=0.3, size=4)
        W = PhononDensity.from_function(_random_density(coefficients))
        scale = float(np.max(W.on_grid(grid)))
        worst_entropy = min(worst_entropy, entropy_production(W, grid, tol) / scale)

    def direction(k: float) -> float:
        return math.cos(2 * math.pi * k) + 0.3 * math.sin(2 * math.pi * k)

    constant = calibrate_constant(direction, COLLISION_SAMPLE_KS, tol)
    consistency = linearization_consistency(
        direction, [1e-1, 1e-2, 1e-3], constant, COLLISION_SAMPLE_KS, quad_tol=tol
    )

    def one(_: float) -> float:
        return 1.0

    q_one = max(abs(quadratic_Q(one, one, k, tol)) for k in COLLISION_SAMPLE_KS)

    perturbed = PhononDensity.from_function(_random_density(np.array([0.3, -0.2, 0.1, 0.15])))
    departure = max(abs(evaluate_C(perturbed, k, tol)) for k in COLLISION_SAMPLE_KS)
    conservation = []
    for size in CONSERVATION_SIZES:
        number, energy = conservation_check(perturbed, WaveGrid(size), tol)
        conservation.append(max(abs(number), abs(energy)))
    try:
        conservation_order = -fit_loglog(CONSERVATION_SIZES, conservation)[0]
    except DegenerateFitError:
        conservation_order = math.nan
    extra_roots = sum(
        len(extra_resonance_roots(k, k2))
        for k in COLLISION_SAMPLE_KS
        for k2 in WaveGrid(12).nodes + 0.007
    )
    return [
        _below("collision.equilibrium", equilibrium_residual, 10.0 * tol),
        _above("collision.departure", departure, 100.0 * tol),
        _above("collision.entropy", worst_entropy, -1e-10),
        _above("collision.linearization_order", consistency.order, 0.8),
        _below("collision.Q_one_one", q_one, 10.0 * tol),
        _above("collision.conservation_order", conservation_order, 1.0),
        _below("collision.extra_resonance_roots", float(extra_roots), 0.0),
    ]


def check_symbols(ctx: VerifyContext) -> List[CriterionResult]:
    table = ctx.table(ctx.config.verify_n[0])
    profile = VProfile(table)
    kappas = compute_kappas(table.v0)
    study = convergence_study(profile, kappas, 1.0, 1.0, [1e-1, 1e-2, 1e-3], ctx.config.quad_tol)
    results = [
        CriterionResult(
            f"symbols.a{index + 1}_decreasing",
            study.errors[-1][index],
            study.errors[0][index],
            study.decreasing(index),
        )
        for index in range(3)
    ]
    results.append(_above("symbols.a1_rate", study.slopes[0], 0.3))
    margins = [
        a3_lower_bound_check(profile, eps, ctx.config.scan_bound, quad_tol=ctx.config.quad_tol)
        for eps in ctx.config.verify_eps
    ]
    variation = (max(margins) - min(margins)) / max(margins)
    results.append(_above("symbols.a3_margin", min(margins), np.finfo(float).tiny))
    results.append(_below("symbols.a3_variation", variation, 0.5))
    return results


def check_fractional_limit(ctx: VerifyContext) -> List[CriterionResult]:
    errors = ctx.sweep().limit_errors
    return [
        CriterionResult(
            "fractional_limit.decreasing", errors[-1], errors[0], _strictly_decreasing(errors)
        ),
        _below("fractional_limit.halved", errors[-1], 0.5 * errors[0]),
    ]


def check_slaving(ctx: VerifyContext) -> List[CriterionResult]:
    sweep = ctx.sweep()
    errors = sweep.slaving_errors
    logging.info(f"Slaved mode sign: {sweep.sign:+d} (negative expected)")
    return [
        CriterionResult(
            "slaving.decreasing", errors[-1], errors[0], _strictly_decreasing(errors)
        ),
        CriterionResult(
            "slaving.sign_consistent", float(sweep.sign), -1.0, sweep.signs_consistent
        ),
    ]


def check_simulation(ctx: VerifyContext) -> List[CriterionResult]:
    results = ctx.sweep().results
    growth = max(result.diagnostics.max_norm_ratio for result in results)
    drift = max(result.diagnostics.mean_drift for result in results)
    r1 = [result.mean_r1 for result in results]
    r2 = [result.mean_r2 for result in results]
    return [
        _below("simulation.norm_growth", growth, 1.0 + 1e-12),
        _below("simulation.mean_drift", drift, 1e-10),
        CriterionResult("simulation.r1_decreasing", r1[-1], r1[0], _strictly_decreasing(r1)),
        CriterionResult("simulation.r2_decreasing", r2[-1], r2[0], _strictly_decreasing(r2)),
    ]


def check_resonance(ctx: VerifyContext) -> List[CriterionResult]:
    ks = WaveGrid(100).nodes
    worst = 0.0
    for k in ks:
        for kp in ks + 0.0031:
            try:
                partner = resonance_partner(k, kp)
            except KernelError:
                worst = math.inf
                continue
            worst = max(worst, resonance_residual(k, kp, partner))
    grid = WaveGrid(200)
    gap, (k, k1) = three_phonon_gap(grid)
    distance = min(abs(k), abs(k1))
    return [
        _below("resonance.partner_residual", worst, 1e-10),
        _above("resonance.gap_nonnegative", gap, 0.0),
        _below("resonance.gap_location", distance, grid.h),
    ]


CRITERIA: Dict[str, Callable[[VerifyContext], List[CriterionResult]]] = {
    "kappa": check_kappa,
    "holder": check_holder,
    "degeneracy": check_degeneracy,
    "kernel_of_L": check_kernel_of_L,
    "collision": check_collision,
    "symbols": check_symbols,
    "fractional_limit": check_fractional_limit,
    "slaving": check_slaving,
    "simulation": check_simulation,
    "resonance": check_resonance,
}


def select_criteria(only: Sequence[str]) -> List[str]:
    if not only:
        return list(CRITERIA)
    unknown = [name for name in only if name not in CRITERIA]
    if unknown:
        raise ExperimentError(
            f"Unknown criteria {unknown}; choose from {', '.join(CRITERIA)}", EXIT_NUMERICAL
        )
    return [name for name in CRITERIA if name in only]


def run_verify(
    config: RunConfig, progress_cb: Optional[ProgressCallback] = None
) -> ExperimentResult:
    """Run the acceptance criteria; summary['passed'] is 1.0 only if every row passed."""
    ctx = VerifyContext(config, progress_cb)
    rows: List[CriterionResult] = []
    for name in select_criteria(config.only):
        notify_progress(progress_cb, ExperimentStage.VERIFYING, name)
        try:
            outcome = CRITERIA[name](ctx)
        except (KernelError, ValueError) as err:
            logging.error(f"Criterion {name} could not be evaluated: {err}")
            outcome = [CriterionResult(name, math.nan, math.nan, False)]
        for row in outcome:
            log = logging.info if row.passed else logging.error
            log(
                f"{'PASS' if row.passed else 'FAIL'} {row.criterion}:"
                f" measured {row.measured:.6g}, threshold {row.threshold:.6g}"
            )
        rows.extend(outcome)
    path = write_csv(
        Path(config.out) / "verify.csv",
        VERIFY_HEADER,
        ([row.criterion, row.measured, row.threshold, str(row.passed).lower()] for row in rows),
    )
    passed = all(row.passed for row in rows)
    notify_progress(progress_cb, ExperimentStage.COMPLETED, "verify")
    return finish_experiment(config, [path], {"passed": float(passed), "rows": float(len(rows))})
