"""Laplace-Fourier symbols, the fractional heat equation and the kinetic simulation."""

from phonon_diffusion.kernel.phonon_kernel import VProfile

from .frac_diffusion import (
    DiffusionParams,
    SpectrumSymmetryError,
    evolve_hat,
    forward_transform,
    real_space_render,
    slaved_S_hat,
    wave_numbers,
    x_grid,
)
from .kinetic_sim import (
    EpsilonResult,
    KineticSimulation,
    MomentRow,
    MomentTrace,
    RunDiagnostics,
    Scheme,
    SimConfig,
    SpectralState,
    StiffnessError,
    SweepReport,
    enforce_dissipation,
    gaussian_bump,
    mode_propagator,
    run_epsilon_sweep,
)
from .symbols import (
    ALPHA,
    ConvergenceReport,
    KappaSet,
    SymbolSample,
    F1_eps,
    F2_eps,
    R1_eps,
    R2_eps,
    a1_eps,
    a2_eps,
    a3_eps,
    a3_lower_bound_check,
    compute_kappas,
    convergence_study,
    kappa_integral,
    limit_symbols,
    mellin_closed_form,
    remainders,
    sample_symbols,
)

__all__ = [
    "ALPHA",
    "ConvergenceReport",
    "DiffusionParams",
    "EpsilonResult",
    "F1_eps",
    "F2_eps",
    "KappaSet",
    "KineticSimulation",
    "MomentRow",
    "MomentTrace",
    "R1_eps",
    "R2_eps",
    "RunDiagnostics",
    "Scheme",
    "SimConfig",
    "SpectralState",
    "SpectrumSymmetryError",
    "StiffnessError",
    "SweepReport",
    "SymbolSample",
    "VProfile",
    "a1_eps",
    "a2_eps",
    "a3_eps",
    "a3_lower_bound_check",
    "compute_kappas",
    "convergence_study",
    "enforce_dissipation",
    "evolve_hat",
    "forward_transform",
    "gaussian_bump",
    "kappa_integral",
    "limit_symbols",
    "mellin_closed_form",
    "mode_propagator",
    "real_space_render",
    "remainders",
    "run_epsilon_sweep",
    "sample_symbols",
    "slaved_S_hat",
    "wave_numbers",
    "x_grid",
]
