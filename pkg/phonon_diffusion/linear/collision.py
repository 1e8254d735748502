# Global imports
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from phonon_diffusion.helpers import fit_loglog
from phonon_diffusion.kernel.parameters_kernel import (
    DEFAULT_QUAD_TOL,
    NoPartnerError,
    WaveGrid,
    reduce_symmetric,
)
from phonon_diffusion.kernel.phonon_kernel import (
    adaptive_quad,
    apply_L_continuous,
    f_minus_roots,
    resonance_partner,
)

ScalarField = Callable[[float], float]
# integrand factor built from (k, k1, k2, k3) in symmetric coordinates
Bracket = Callable[[float, float, float, float], float]

_PI = math.pi


def _omega_s(x: float) -> float:
    return abs(math.sin(_PI * x))


def _omega_prime_s(x: float) -> float:
    if x == 0.0:
        return 0.0
    return math.copysign(_PI * math.cos(_PI * x), x)


@dataclass(frozen=True)
class EquilibriumParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.a < 0.0 or self.b <= 0.0:
            raise ValueError(f"equilibrium needs a >= 0 and b > 0, got a={self.a}, b={self.b}")


class PhononDensity:
    """Positive density W(k), stored through 1/W and the finite product w W.

    Equilibria W = 1/(a + b w) stay finite in both factors even for a = 0.
    """

    def __init__(self, reciprocal: ScalarField, omega_weighted: ScalarField) -> None:
        self.reciprocal = reciprocal
        self.omega_weighted = omega_weighted

    def __call__(self, k: float) -> float:
        return 1.0 / self.reciprocal(reduce_symmetric(k))

    @classmethod
    def equilibrium(cls, a: float, b: float) -> "PhononDensity":
        params = EquilibriumParams(a, b)

        def reciprocal(k: float) -> float:
            return params.a + params.b * _omega_s(k)

        def omega_weighted(k: float) -> float:
            w = _omega_s(k)
            if params.a == 0.0:
                return 1.0 / params.b
            return w / (params.a + params.b * w)

        return cls(reciprocal, omega_weighted)

    @classmethod
    def from_function(cls, func: ScalarField) -> "PhononDensity":
        return cls(
            lambda k: 1.0 / func(k),
            lambda k: _omega_s(k) * func(k),
        )

    @classmethod
    def from_samples(cls, grid: WaveGrid, values: Sequence[float]) -> "PhononDensity":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n,) or not np.all(values > 0.0):
            raise ValueError("density samples must be positive, one per grid node")
        nodes = np.append(grid.nodes, grid.nodes[0] + 1.0)
        spline = CubicSpline(nodes, np.append(values, values[0]), bc_type="periodic")

        def density(k: float) -> float:
            # wrap into the spline's period [nodes[0], nodes[0] + 1)
            return float(spline(nodes[0] + (k - nodes[0]) % 1.0))

        return cls.from_function(density)

    def on_grid(self, grid: WaveGrid) -> np.ndarray:
        return np.array([self(k) for k in grid.nodes])


# ---------------- REDUCED COLLISION INTEGRAL ----------------
def _collision_integral(k: float, bracket: Bracket, quad_tol: float) -> float:
    """Integral over k2 of J(k, k2) * bracket(k, k1, k2, k3).

    k1 is the non-trivial resonance partner, k3 = k + k1 - k2 and
    J = 1/|w'(k1) - w'(k3)| resolves the frequency delta.
    """
    ks = reduce_symmetric(k)

    def integrand(k2: float) -> float:
        try:
            k1 = resonance_partner(ks, k2)
        except NoPartnerError:
            logging.debug(f"No partner at k={ks}, k2={k2}; measure-zero point skipped")
            return 0.0
        k3 = reduce_symmetric(ks + k1 - k2)
        gap = abs(_omega_prime_s(k1) - _omega_prime_s(k3))
        if gap == 0.0:
            return 0.0
        return bracket(ks, k1, k2, k3) / gap

    edges = {-0.5, 0.5, 0.0, ks}
    edges.update(float(r) for r in f_minus_roots(ks))
    edges = sorted(edges)
    panels = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    tol = quad_tol / len(panels)
    return sum(adaptive_quad(integrand, a, b, tol) for a, b in panels)


def extra_resonance_roots(k: float, k2: float, samples: int = 4001) -> List[float]:
    """Roots k1 of the frequency balance at fixed (k, k2) other than k2 and the partner.

    Scans k1 over the torus for sign changes and refines each with brentq.
    """
    ks, k2s = reduce_symmetric(k), reduce_symmetric(k2)

    def balance(k1: float) -> float:
        return (
            _omega_s(ks)
            + _omega_s(reduce_symmetric(k1))
            - _omega_s(k2s)
            - _omega_s(reduce_symmetric(ks + k1 - k2s))
        )

    expected = [k2s]
    try:
        expected.append(resonance_partner(ks, k2s))
    except NoPartnerError:
        pass
    grid = np.linspace(-0.5, 0.5, samples)
    values = np.array([balance(x) for x in grid])
    spacing = grid[1] - grid[0]
    extra = []
    for i in np.nonzero(values[:-1] * values[1:] < 0.0)[0]:
        root = optimize.brentq(balance, grid[i], grid[i + 1], xtol=1e-14)
        if all(abs(reduce_symmetric(root - x)) > 2.0 * spacing for x in expected):
            extra.append(float(root))
    if extra:
        logging.warning(f"Unexpected resonance roots at k={ks}, k2={k2s}: {extra}")
    return extra


def evaluate_C(
    W: PhononDensity, k: float, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Reduced four-phonon operator C(W)(k) with the F^2 weight set to w w1 w2 w3."""
    cache = {}

    def factors(x: float) -> Tuple[float, float]:
        if x not in cache:
            cache[x] = (W.omega_weighted(x), W.reciprocal(x))
        return cache[x]

    def bracket(k0: float, k1: float, k2: float, k3: float) -> float:
        (p0, r0), (p1, r1), (p2, r2), (p3, r3) = (factors(x) for x in (k0, k1, k2, k3))
        return p0 * p1 * p2 * p3 * (r0 + r1 - r2 - r3)

    return _collision_integral(k, bracket, quad_tol)


def conservation_check(
    W: PhononDensity, grid: WaveGrid, quad_tol: float = DEFAULT_QUAD_TOL
) -> Tuple[float, float]:
    """(integral of C, integral of w C) by grid quadrature."""
    values = np.array([evaluate_C(W, k, quad_tol) for k in grid.nodes])
    weights = np.asarray(grid.weights)
    omegas = np.abs(np.sin(_PI * grid.nodes))
    return float(np.sum(values * weights)), float(np.sum(omegas * values * weights))


def entropy_production(
    W: PhononDensity, grid: WaveGrid, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Integral of C(W)/W, nonnegative by the H-theorem."""
    values = np.array([evaluate_C(W, k, quad_tol) * W.reciprocal(k) for k in grid.nodes])
    return float(np.sum(values * grid.weights))


# ---------------- LINEARIZATION ----------------
def linearized_C(
    f: ScalarField, k: float, T_bar: float = 1.0, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """(1/Wbar) DC(Wbar)(Wbar f) at Wbar = T_bar / w."""
    ks = reduce_symmetric(k)

    def bracket(k0: float, k1: float, k2: float, k3: float) -> float:
        return (
            _omega_s(k2) * f(k2)
            + _omega_s(k3) * f(k3)
            - _omega_s(k0) * f(k0)
            - _omega_s(k1) * f(k1)
        )

    return T_bar**2 * _omega_s(ks) * _collision_integral(ks, bracket, quad_tol)


def perturbed_difference_quotient(
    f: ScalarField,
    k: float,
    eps: float,
    T_bar: float = 1.0,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> float:
    """C(Wbar (1 + eps f))(k) / (eps Wbar(k)).

    The bracket 1/W + 1/W1 - 1/W2 - 1/W3 is expanded as
    (resonance residual - sum(+-w_i eps f_i / (1 + eps f_i))) / T_bar.
    """
    ks = reduce_symmetric(k)

    def bracket(k0: float, k1: float, k2: float, k3: float) -> float:
        w = [_omega_s(x) for x in (k0, k1, k2, k3)]
        d = [eps * f(x) for x in (k0, k1, k2, k3)]
        residual = w[0] + w[1] - w[2] - w[3]
        correction = sum(
            sign * wi * di / (1.0 + di)
            for sign, wi, di in zip((1.0, 1.0, -1.0, -1.0), w, d)
        )
        growth = (1.0 + d[0]) * (1.0 + d[1]) * (1.0 + d[2]) * (1.0 + d[3])
        return T_bar**3 * growth * (residual - correction) / eps

    return _omega_s(ks) / T_bar * _collision_integral(ks, bracket, quad_tol)


def calibrate_constant(
    f: ScalarField,
    sample_ks: Sequence[float],
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> float:
    """Least-squares c with linearized_C(f) = c * L f, L in kernel form."""
    reduced = np.array([linearized_C(f, k, quad_tol=quad_tol) for k in sample_ks])
    kernel_form = np.array([apply_L_continuous(k, f, quad_tol) for k in sample_ks])
    denominator = float(kernel_form @ kernel_form)
    if denominator == 0.0:
        raise ValueError("calibration direction lies in the kernel of L")
    constant = float(reduced @ kernel_form) / denominator
    logging.info(f"Calibrated normalization constant c={constant:.10g}")
    return constant


@dataclass(frozen=True)
class ConsistencyResult:
    eps: Tuple[float, ...]
    errors: Tuple[float, ...]
    order: float


def linearization_consistency(
    f: ScalarField,
    eps_list: Sequence[float],
    constant: float,
    sample_ks: Sequence[float],
    T_bar: float = 1.0,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> ConsistencyResult:
    """Max over samples of |C(Wbar(1+eps f))/(eps Wbar) - c T_bar^2 L f|, per eps."""
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    reference = np.array(
        [constant * T_bar**2 * apply_L_continuous(k, f, quad_tol) for k in sample_ks]
    )
    errors: List[float] = []
    for eps in eps_list:
        quotient = np.array(
            [perturbed_difference_quotient(f, k, eps, T_bar, quad_tol) for k in sample_ks]
        )
        errors.append(float(np.max(np.abs(quotient - reference))))
        logging.debug(f"Linearization error at eps={eps:.1e}: {errors[-1]:.3e}")
    order = fit_loglog(eps_list, errors)[0] if len(eps_list) >= 3 else math.nan
    return ConsistencyResult(tuple(eps_list), tuple(errors), order)


def quadratic_Q(
    f: ScalarField, g: ScalarField, k: float, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Symmetric bilinear form polarized from
    Q(f, f) = w int J [2 (w - w3)(f1 f2 - f f3) + (w + w1)(f2 f3 - f f1)] dk2.
    """
    ks = reduce_symmetric(k)

    def sym(a: ScalarField, b: ScalarField, x: float, y: float) -> float:
        return 0.5 * (a(x) * b(y) + b(x) * a(y))

    def bracket(k0: float, k1: float, k2: float, k3: float) -> float:
        w0, w1, w3 = _omega_s(k0), _omega_s(k1), _omega_s(k3)
        return 2.0 * (w0 - w3) * (sym(f, g, k1, k2) - sym(f, g, k0, k3)) + (w0 + w1) * (
            sym(f, g, k2, k3) - sym(f, g, k0, k1)
        )

    return _omega_s(ks) * _collision_integral(ks, bracket, quad_tol)
