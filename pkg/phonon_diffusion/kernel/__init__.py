"""Collision kernel of the linearized four-phonon operator of the FPU-β chain."""

from .kernel_cache import (
    KernelCacheError,
    cache_filename,
    default_cache_dir,
    load_table,
    save_table,
)
from .parameters_kernel import (
    DEFAULT_QUAD_TOL,
    KernelError,
    KernelTable,
    NoPartnerError,
    QuadratureError,
    SingularCurveError,
    WaveGrid,
    WaveNumberDomainError,
    reduce_symmetric,
    reduce_unit,
)
from .phonon_kernel import (
    V0Estimate,
    VProfile,
    apply_kernel,
    apply_L_continuous,
    assemble_kernel,
    degeneracy_slope,
    estimate_v0,
    f_minus,
    f_minus_roots,
    f_plus,
    kernel_K,
    omega,
    omega_prime,
    resonance_partner,
    resonance_residual,
    three_phonon_gap,
    v_of_k,
)

__all__ = [
    "DEFAULT_QUAD_TOL",
    "KernelCacheError",
    "KernelError",
    "KernelTable",
    "NoPartnerError",
    "QuadratureError",
    "SingularCurveError",
    "V0Estimate",
    "VProfile",
    "WaveGrid",
    "WaveNumberDomainError",
    "apply_kernel",
    "apply_L_continuous",
    "assemble_kernel",
    "cache_filename",
    "default_cache_dir",
    "degeneracy_slope",
    "estimate_v0",
    "f_minus",
    "f_minus_roots",
    "f_plus",
    "kernel_K",
    "load_table",
    "omega",
    "omega_prime",
    "reduce_symmetric",
    "reduce_unit",
    "resonance_partner",
    "resonance_residual",
    "save_table",
    "three_phonon_gap",
    "v_of_k",
]
