# Global imports
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum, auto
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from phonon_diffusion.kernel.parameters_kernel import KernelTable
from phonon_diffusion.kernel.phonon_kernel import omega_prime
from phonon_diffusion.linear.linop import (
    DiscreteOperator,
    decompose_state,
    weighted_norms,
)
from phonon_diffusion.limit.frac_diffusion import (
    DiffusionParams,
    evolve_hat,
    forward_transform,
    slaved_S_hat,
    wave_numbers,
    x_grid,
)
from phonon_diffusion.limit.symbols import ALPHA, KappaSet, remainders

STIFFNESS_LIMIT = 10.0
REFERENCE_P = 1.0

FieldSampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


class StiffnessError(ValueError):
    """Time step too large for the scaled collision operator."""


class Scheme(Enum):
    CRANK_NICOLSON = auto()
    IMPLICIT_EULER = auto()


@dataclass(frozen=True)
class SimConfig:
    eps: float
    alpha: float = ALPHA
    T_bar: float = 1.0
    box_length: float = 64.0
    modes: int = 64
    n: int = 256
    t_end: float = 1.0
    steps: int = 2000
    scheme: Scheme = Scheme.CRANK_NICOLSON
    initial_width: float = 4.0
    record_every: int = 100
    enforce_dissipation: bool = False

    def __post_init__(self) -> None:
        for name in ("eps", "alpha", "T_bar", "box_length", "t_end", "initial_width"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.modes < 2 or self.modes % 2:
            raise ValueError(f"modes must be an even count >= 2, got {self.modes}")
        if self.steps < 1 or self.record_every < 1:
            raise ValueError("steps and record_every must be positive")

    @property
    def dt(self) -> float:
        return self.t_end / self.steps


@dataclass
class SpectralState:
    """f_hat[j, i] is the xi_j Fourier coefficient at node k_i (numpy FFT order)."""

    t: float
    step_index: int
    f_hat: np.ndarray


@dataclass(frozen=True)
class RunDiagnostics:
    max_norm_ratio: float
    mean_drift: float


@dataclass(frozen=True)
class MomentRow:
    t: float
    j: int
    xi: float
    T: complex
    S: complex
    h_norm: float
    l2_norm: float
    r1: float
    r2: float


@dataclass
class MomentTrace:
    eps: float
    rows: List[MomentRow] = field(default_factory=list)

    @property
    def times(self) -> List[float]:
        return sorted({row.t for row in self.rows})

    def extend(self, rows: Sequence[MomentRow]) -> None:
        if self.rows and rows and rows[0].t <= self.rows[-1].t:
            raise ValueError("trace times must be strictly increasing")
        self.rows.extend(rows)

    def by_mode(self) -> Dict[int, List[MomentRow]]:
        grouped: Dict[int, List[MomentRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.j, []).append(row)
        return grouped


# ---------------- PROPAGATORS ----------------
def enforce_dissipation(op: DiscreteOperator, matrix: np.ndarray) -> np.ndarray:
    """Clip positive eigenvalues of the w-symmetric L, returning L unchanged if none."""
    w = op.weights
    symmetric = 0.5 * ((matrix * w[:, None]) + (matrix * w[:, None]).T)
    values, vectors = linalg.eigh(symmetric)
    scale = float(np.max(np.abs(values)))
    if values[-1] <= 1e-14 * scale:
        return matrix
    logging.warning(
        f"Discrete L has {int(np.sum(values > 0.0))} positive eigenvalues"
        f" (max {values[-1]:.3e}), clipping"
    )
    clipped = (vectors * np.minimum(values, 0.0)) @ vectors.T
    return clipped / w[:, None]


def mode_propagator(
    matrix: np.ndarray,
    group_velocity: np.ndarray,
    xi: float,
    config: SimConfig,
) -> np.ndarray:
    """One-step map of d/dt f = eps^-alpha (T_bar^2 L - i eps xi w') f."""
    n = matrix.shape[0]
    generator = config.eps ** (-config.alpha) * (
        config.T_bar**2 * matrix - 1j * config.eps * xi * np.diag(group_velocity)
    )
    identity = np.eye(n)
    if config.scheme is Scheme.CRANK_NICOLSON:
        factors = linalg.lu_factor(identity - 0.5 * config.dt * generator)
        return linalg.lu_solve(factors, identity + 0.5 * config.dt * generator)
    factors = linalg.lu_factor(identity - config.dt * generator)
    return linalg.lu_solve(factors, identity.astype(complex))


class KineticSimulation:
    """Per-mode integrator of the rescaled linearized equation on a periodic box."""

    def __init__(
        self, table: KernelTable, config: SimConfig, workers: int = 1
    ) -> None:
        if table.n != config.n:
            raise ValueError(f"kernel table has n={table.n}, config asks n={config.n}")
        self.config = config
        self.op = DiscreteOperator(table)
        matrix = self.op.matrix()
        if config.enforce_dissipation:
            matrix = enforce_dissipation(self.op, matrix)
        self.matrix = matrix

        ratio = (
            config.dt
            * config.eps ** (-config.alpha)
            * config.T_bar**2
            * float(np.max(np.sum(np.abs(matrix), axis=1)))
        )
        if ratio > STIFFNESS_LIMIT:
            raise StiffnessError(
                f"stiffness ratio {ratio:.3g} exceeds {STIFFNESS_LIMIT}"
                f" (eps={config.eps}, steps={config.steps}, t_end={config.t_end})"
            )
        self.stiffness_ratio = ratio

        self.group_velocity = omega_prime(self.op.nodes)
        self.xi = wave_numbers(config.modes, config.box_length)
        half = config.modes // 2
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            propagators = list(
                pool.map(
                    lambda j: mode_propagator(
                        matrix, self.group_velocity, self.xi[j], config
                    ),
                    range(half),
                )
            )
        self.propagators = np.array(propagators)
        logging.info(
            f"Simulation ready: eps={config.eps}, {half} modes, n={config.n},"
            f" dt={config.dt:.3e}, stiffness ratio {ratio:.3g}"
        )

    @property
    def half(self) -> int:
        return self.config.modes // 2

    def init(self, f0: Union[FieldSampler, np.ndarray, None] = None) -> SpectralState:
        """Transform real f0(x, k) in x; the Nyquist mode is dropped."""
        config = self.config
        if f0 is None:
            f0 = gaussian_bump(config)
        if callable(f0):
            x = x_grid(config.modes, config.box_length)
            samples = f0(x[:, None], self.op.nodes[None, :])
        else:
            samples = np.asarray(f0)
        if np.iscomplexobj(samples) and np.any(np.imag(samples) != 0.0):
            raise ValueError("initial data f0(x, k) must be real")
        samples = np.broadcast_to(samples, (config.modes, config.n))
        f_hat = forward_transform(samples, config.box_length).astype(complex)
        f_hat[self.half] = 0.0
        return SpectralState(t=0.0, step_index=0, f_hat=f_hat)

    def step(self, state: SpectralState) -> SpectralState:
        f_hat = state.f_hat
        half = self.half
        advanced = np.zeros_like(f_hat)
        advanced[:half] = np.einsum("jab,jb->ja", self.propagators, f_hat[:half])
        # negative modes mirror the positive ones for real data
        advanced[half + 1 :] = np.conj(advanced[1:half][::-1])
        next_index = state.step_index + 1
        return SpectralState(
            t=next_index * self.config.dt, step_index=next_index, f_hat=advanced
        )

    def l2_norm(self, state: SpectralState) -> float:
        """L2(x, k) norm through Parseval on the box."""
        weighted = np.abs(state.f_hat) ** 2 * self.op.weights[None, :]
        return float(np.sqrt(self.config.box_length * np.sum(weighted)))

    def extract_moments(self, state: SpectralState) -> List[MomentRow]:
        eps = self.config.eps
        norm = self.l2_norm(state)
        rows = []
        for j in range(self.half):
            T, S, h = decompose_state(self.op, state.f_hat[j], eps)
            r1, r2 = remainders(self.op, state.f_hat[j], eps, REFERENCE_P, self.xi[j])
            rows.append(
                MomentRow(
                    t=state.t,
                    j=j,
                    xi=float(self.xi[j]),
                    T=complex(T),
                    S=complex(S),
                    h_norm=weighted_norms(self.op, h)[0],
                    l2_norm=norm,
                    r1=abs(r1),
                    r2=abs(r2),
                )
            )
        return rows

    def run(self, state: SpectralState) -> Tuple[SpectralState, MomentTrace, RunDiagnostics]:
        trace = MomentTrace(eps=self.config.eps)
        trace.extend(self.extract_moments(state))
        norms = [self.l2_norm(state)]
        means = [self.op.bracket(state.f_hat[0])]
        for _ in range(self.config.steps):
            state = self.step(state)
            norms.append(self.l2_norm(state))
            means.append(self.op.bracket(state.f_hat[0]))
            if state.step_index % self.config.record_every == 0 or (
                state.step_index == self.config.steps
            ):
                trace.extend(self.extract_moments(state))
        norms_array = np.array(norms)
        growth = float(np.max(norms_array[1:] / np.maximum(norms_array[:-1], 1e-300)))
        drift = float(np.max(np.abs(np.array(means) - means[0])))
        return state, trace, RunDiagnostics(max_norm_ratio=growth, mean_drift=drift)


def gaussian_bump(config: SimConfig, amplitude: float = 1.0) -> FieldSampler:
    """k-independent Gaussian in x centered in the box."""
    center = 0.5 * config.box_length
    width = config.initial_width

    def sampler(x: np.ndarray, k: np.ndarray) -> np.ndarray:
        bump = amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)
        return bump + 0.0 * k

    return sampler


# ---------------- EPSILON SWEEP ----------------
@dataclass(frozen=True)
class EpsilonResult:
    eps: float
    trace: MomentTrace
    diagnostics: RunDiagnostics
    limit_error: float
    slaving_errors: Dict[int, float]
    mode_signs: Dict[int, int]
    mean_r1: float
    mean_r2: float


@dataclass(frozen=True)
class SweepReport:
    results: List[EpsilonResult]
    sign: int

    @property
    def eps(self) -> List[float]:
        return [result.eps for result in self.results]

    @property
    def limit_errors(self) -> List[float]:
        return [result.limit_error for result in self.results]

    @property
    def slaving_errors(self) -> List[float]:
        return [result.slaving_errors[self.sign] for result in self.results]

    @property
    def signs_consistent(self) -> bool:
        finest = self.results[-1].mode_signs
        return len(set(finest.values())) == 1 and self.sign in finest.values()


def _compare_with_limit(
    trace: MomentTrace, kappas: KappaSet, T_bar: float
) -> Tuple[float, Dict[int, float], Dict[int, int]]:
    params = DiffusionParams(kappas, T_bar)
    grouped = trace.by_mode()
    limit_error = 0.0
    slaving = {1: 0.0, -1: 0.0}
    per_mode: Dict[int, Dict[int, float]] = {}
    for j, rows in grouped.items():
        xi = np.array([rows[0].xi])
        T0 = np.array([rows[0].T])
        per_mode[j] = {1: 0.0, -1: 0.0}
        for row in rows:
            expected = evolve_hat(params, T0, xi, row.t)[0]
            limit_error = max(limit_error, abs(row.T - expected))
            for sign in (1, -1):
                slaved = slaved_S_hat(kappas, np.array([row.T]), xi, sign)[0]
                gap = abs(row.S - slaved)
                slaving[sign] = max(slaving[sign], gap)
                per_mode[j][sign] = max(per_mode[j][sign], gap)
    # sign preference per mode over the lower half of the resolved spectrum
    lower = sorted(per_mode)[1 : max(2, len(per_mode) // 2)]
    mode_signs = {j: min((1, -1), key=lambda s: per_mode[j][s]) for j in lower}
    return limit_error, slaving, mode_signs


def run_epsilon_sweep(
    table: KernelTable,
    template: SimConfig,
    eps_list: Sequence[float],
    kappas: KappaSet,
    f0: Optional[FieldSampler] = None,
    workers: int = 1,
) -> SweepReport:
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    configs = [replace(template, eps=eps) for eps in eps_list]

    def run_one(config: SimConfig) -> EpsilonResult:
        simulation = KineticSimulation(table, config)
        _, trace, diagnostics = simulation.run(simulation.init(f0))
        limit_error, slaving, mode_signs = _compare_with_limit(trace, kappas, config.T_bar)
        logging.info(
            f"eps={config.eps}: limit error {limit_error:.4e}, slaving error"
            f" -:{slaving[-1]:.4e} +:{slaving[1]:.4e}"
        )
        return EpsilonResult(
            eps=config.eps,
            trace=trace,
            diagnostics=diagnostics,
            limit_error=limit_error,
            slaving_errors=slaving,
            mode_signs=mode_signs,
            mean_r1=float(np.mean([row.r1 for row in trace.rows])),
            mean_r2=float(np.mean([row.r2 for row in trace.rows])),
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run_one, configs))
    finest = results[-1].slaving_errors
    sign = -1 if finest[-1] <= finest[1] else 1
    logging.info(f"Slaved mode sign selected: {sign:+d}")
    return SweepReport(results=results, sign=sign)
