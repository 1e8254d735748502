# Global imports
from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Dict, Tuple

import numpy as np
from scipy import linalg

from phonon_diffusion.kernel.parameters_kernel import KernelTable
from phonon_diffusion.kernel.phonon_kernel import (
    VProfile,
    apply_L_continuous,
    omega,
    v_of_k,
)

ZERO_EIGEN_RTOL = 1e-6


class InvalidTableError(RuntimeError):
    """The kernel table cannot support the weighted projection."""


class DiagonalMode(Enum):
    ANALYTIC = auto()
    ROW_SUM = auto()


@dataclass(frozen=True)
class ProjectionCoeffs:
    T_tilde: complex
    S_tilde: complex
    m0: float


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum of -L on piecewise constants, enriched by the invariant 1/w.

    `eigenvalues` are sorted by magnitude; `c0` is the third smallest.
    `enriched` is False when the table is reported on the plain operator.
    `plain_eigenvalues` come from the V^(1/2)-symmetrized piecewise-constant
    operator alone, `coercivity` is its minimum on the V-orthogonal
    complement of span{1, 1/w}.
    """

    n: int
    eigenvalues: np.ndarray
    zero_count: int
    c0: float
    coercivity: float
    plain_eigenvalues: np.ndarray
    residual_one: float
    residual_omega_inv: float
    enriched: bool = True


@dataclass
class DiscreteOperator:
    table: KernelTable
    mode: DiagonalMode = DiagonalMode.ROW_SUM
    _factorizations: Dict[complex, tuple] = field(
        default_factory=dict, init=False, repr=False
    )
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self) -> None:
        grid = self.table.grid
        self.weights = np.asarray(grid.weights)
        self.nodes = np.asarray(grid.nodes)
        self.omega_inv = 1.0 / omega(self.nodes)
        if self.mode is DiagonalMode.ROW_SUM:
            # V_i = sum_j K_ij w_j, evaluated exactly as in apply_L
            self.Vdiag = self.table.K @ self.weights
        else:
            self.Vdiag = np.array(self.table.V, dtype=float)
        if not np.all(self.Vdiag > 0.0):
            raise InvalidTableError("collision frequency must be positive at all nodes")

    @property
    def n(self) -> int:
        return self.table.n

    def bracket(self, values: np.ndarray):
        """Discrete <g> = sum g_i w_i."""
        return np.sum(values * self.weights, axis=-1)

    def matrix(self) -> np.ndarray:
        """Dense L with (L f)_i = sum_j K_ij w_j f_j - V_i f_i."""
        return self.table.K * self.weights[None, :] - np.diag(self.Vdiag)

    def resolvent_solve(self, shift: complex, rhs: np.ndarray) -> np.ndarray:
        """Solve (shift - L) x = rhs; LU factors are cached per shift."""
        key = complex(shift)
        with self._lock:
            factors = self._factorizations.get(key)
            if factors is None:
                system = key * np.eye(self.n) - self.matrix()
                factors = linalg.lu_factor(system)
                self._factorizations[key] = factors
        return linalg.lu_solve(factors, rhs)


def apply_L(op: DiscreteOperator, f: np.ndarray) -> np.ndarray:
    return op.table.K @ (f * op.weights) - op.Vdiag * f


def conservation_moments(op: DiscreteOperator, f: np.ndarray) -> Tuple[complex, complex]:
    Lf = apply_L(op, f)
    return op.bracket(Lf), op.bracket(op.omega_inv * Lf)


def _brackets(op: DiscreteOperator) -> Tuple[float, float, float, float]:
    mean_v = float(op.bracket(op.Vdiag))
    mean_vw = float(op.bracket(op.Vdiag * op.omega_inv))
    mean_vww = float(op.bracket(op.Vdiag * op.omega_inv**2))
    m0 = mean_v**2 * mean_vww - mean_vw**2 * mean_v
    if not m0 > 0.0:
        raise InvalidTableError(f"projection normalization m0={m0} is not positive")
    return mean_v, mean_vw, mean_vww, m0


def project_Pi(op: DiscreteOperator, f: np.ndarray) -> Tuple[ProjectionCoeffs, np.ndarray]:
    """V-weighted orthogonal projection onto span{1, 1/w}."""
    mean_v, mean_vw, _, m0 = _brackets(op)
    V = op.Vdiag
    T_tilde = op.bracket(V * f) / mean_v
    S_tilde = op.bracket((mean_v * V * op.omega_inv - mean_vw * V) * f) / m0
    projected = T_tilde + S_tilde * (mean_v * op.omega_inv - mean_vw)
    return ProjectionCoeffs(T_tilde, S_tilde, m0), projected


def projection_matrix(op: DiscreteOperator) -> np.ndarray:
    mean_v, mean_vw, _, m0 = _brackets(op)
    V, w = op.Vdiag, op.weights
    t_row = V * w / mean_v
    s_row = (mean_v * V * op.omega_inv - mean_vw * V) * w / m0
    direction = mean_v * op.omega_inv - mean_vw
    return np.outer(np.ones(op.n), t_row) + np.outer(direction, s_row)


def dirichlet_form(op: DiscreteOperator, f: np.ndarray) -> float:
    """-<L f, f> in the plain inner product."""
    return float(-np.real(op.bracket(apply_L(op, f) * np.conj(f))))


def weighted_norms(op: DiscreteOperator, f: np.ndarray) -> Tuple[float, float]:
    """(||f||_V, ||f||_{1/V})."""
    squared = np.abs(f) ** 2
    return (
        float(np.sqrt(op.bracket(op.Vdiag * squared))),
        float(np.sqrt(op.bracket(squared / op.Vdiag))),
    )


def decompose_state(
    op: DiscreteOperator, f: np.ndarray, eps: float
) -> Tuple[complex, complex, np.ndarray]:
    """Split f = T + eps^(3/5) S / w + eps^(4/5) h."""
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    coeffs, _ = project_Pi(op, f)
    mean_v, mean_vw, _, _ = _brackets(op)
    T = coeffs.T_tilde - coeffs.S_tilde * mean_vw
    S = eps ** (-0.6) * mean_v * coeffs.S_tilde
    h = (f - T - eps**0.6 * S * op.omega_inv) / eps**0.8
    return T, S, h


def _cell_moments(
    op: DiscreteOperator, profile: VProfile, power: float
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Cell integrals of V and V w^-p, and the integral of V w^-2p, from the V model."""
    cells = list(zip(op.table.grid.edges[:-1], op.table.grid.edges[1:]))
    diagonal = np.array([profile.weighted_integral(a, b) for a, b in cells])
    cross = np.array([profile.weighted_integral(a, b, power=power) for a, b in cells])
    self_mass = profile.weighted_integral(-0.5, 0.5, power=2.0 * power)
    return diagonal, cross, self_mass


def matches_continuous_kernel(op: DiscreteOperator, samples: int = 3) -> bool:
    """Whether the table's V agrees with the grid-free collision frequency."""
    n = op.n
    tol = op.table.quad_tol
    for i in np.linspace(n // 2, n - 1, samples).astype(int):
        reference = v_of_k(op.nodes[i], tol)
        if abs(op.table.V[i] - reference) > 10.0 * tol + 1e-9 * abs(reference):
            return False
    return True


def _enrichment_action(op: DiscreteOperator, power: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodal values of g = w^-p and of the grid-free L g; L g is even in k."""

    def g(x: float) -> float:
        sine = abs(math.sin(math.pi * x))
        return sine**-power if sine > 0.0 else 0.0

    n = op.n
    action = np.empty(n)
    for i in range(n // 2, n):
        action[i] = action[n - 1 - i] = apply_L_continuous(op.nodes[i], g, op.table.quad_tol)
    return op.omega_inv**power, action


def spectral_report(op: DiscreteOperator, power: float = 1.0) -> SpectralReport:
    """Spectrum of -L, enriched by w^-power when the table is the physical kernel.

    power = 1 adds the invariant 1/w; other powers give a direction outside
    the kernel. Tables that do not reproduce the grid-free V are reported on
    the plain piecewise-constant operator.
    """
    n = op.n
    if n > 2000:
        raise ValueError(f"dense eigensolve limited to n <= 2000, got n={n}")
    if not 0.0 < power <= 1.0:
        raise ValueError(f"enrichment power must lie in (0, 1], got {power}")
    w = op.weights
    V = op.Vdiag
    stiffness_pc = np.diag(V * w) - (op.table.K * w[None, :]) * w[:, None]
    stiffness_pc = 0.5 * (stiffness_pc + stiffness_pc.T)
    mass_pc = np.diag(V * w)
    enriched = matches_continuous_kernel(op)

    try:
        plain = linalg.eigh(stiffness_pc, mass_pc, eigvals_only=True)
        if enriched:
            values, action = _enrichment_action(op, power)
            diagonal, cross, self_mass = _cell_moments(op, VProfile(op.table), power)
            stiffness = np.zeros((n + 1, n + 1))
            stiffness[:n, :n] = stiffness_pc
            stiffness[:n, n] = stiffness[n, :n] = -w * action
            stiffness[n, n] = -float(np.sum(w * values * action))
            mass = np.zeros((n + 1, n + 1))
            mass[:n, :n] = np.diag(diagonal)
            mass[:n, n] = mass[n, :n] = cross
            mass[n, n] = self_mass
            eigenvalues = linalg.eigh(stiffness, mass, eigvals_only=True)
        else:
            logging.warning(
                f"Kernel table n={n} does not reproduce the grid-free V,"
                " reporting the plain spectrum"
            )
            eigenvalues = plain

        basis = np.column_stack([np.ones(n), op.omega_inv])
        complement = linalg.null_space((mass_pc @ basis).T)
        restricted = linalg.eigh(
            complement.T @ stiffness_pc @ complement,
            complement.T @ mass_pc @ complement,
            eigvals_only=True,
        )
    except (linalg.LinAlgError, ValueError) as err:
        raise InvalidTableError(f"eigensolver failed: {err}") from err

    eigenvalues = eigenvalues[np.argsort(np.abs(eigenvalues))]
    scale = float(np.max(np.abs(eigenvalues)))
    zero_count = int(np.sum(np.abs(eigenvalues) < ZERO_EIGEN_RTOL * scale))
    ones_residual = float(np.max(np.abs(apply_L(op, np.ones(n)))))
    omega_residual = weighted_norms(op, apply_L(op, op.omega_inv))[0]
    report = SpectralReport(
        n=n,
        eigenvalues=eigenvalues,
        zero_count=zero_count,
        c0=float(abs(eigenvalues[2])),
        coercivity=float(restricted[0]),
        plain_eigenvalues=plain,
        residual_one=ones_residual,
        residual_omega_inv=omega_residual,
        enriched=enriched,
    )
    logging.info(
        f"Spectrum n={n}: {zero_count} zero eigenvalues, c0={report.c0:.6g},"
        f" ||L1||={ones_residual:.3e}, ||L w^-1||_V={omega_residual:.3e}"
    )
    return report
