"""Linearized operator L = K - V and the four-phonon collision operator."""

from .collision import (
    ConsistencyResult,
    EquilibriumParams,
    PhononDensity,
    calibrate_constant,
    conservation_check,
    entropy_production,
    evaluate_C,
    extra_resonance_roots,
    linearization_consistency,
    linearized_C,
    perturbed_difference_quotient,
    quadratic_Q,
)
from .linop import (
    DiagonalMode,
    DiscreteOperator,
    InvalidTableError,
    ProjectionCoeffs,
    SpectralReport,
    apply_L,
    conservation_moments,
    decompose_state,
    dirichlet_form,
    matches_continuous_kernel,
    project_Pi,
    projection_matrix,
    spectral_report,
    weighted_norms,
)

__all__ = [
    "ConsistencyResult",
    "DiagonalMode",
    "DiscreteOperator",
    "EquilibriumParams",
    "InvalidTableError",
    "PhononDensity",
    "ProjectionCoeffs",
    "SpectralReport",
    "apply_L",
    "calibrate_constant",
    "conservation_check",
    "conservation_moments",
    "decompose_state",
    "dirichlet_form",
    "entropy_production",
    "evaluate_C",
    "extra_resonance_roots",
    "linearization_consistency",
    "linearized_C",
    "matches_continuous_kernel",
    "perturbed_difference_quotient",
    "project_Pi",
    "projection_matrix",
    "quadratic_Q",
    "spectral_report",
    "weighted_norms",
]
