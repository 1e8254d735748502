# Global imports
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from phonon_diffusion.helpers import fit_loglog
from phonon_diffusion.kernel.parameters_kernel import DEFAULT_QUAD_TOL
from phonon_diffusion.kernel.phonon_kernel import VProfile, adaptive_quad
from phonon_diffusion.linear.linop import DiscreteOperator, project_Pi

ALPHA = 8.0 / 5.0
KAPPA_EXPONENT = 3.0 / 5.0
_PI = math.pi
_U_MAX = 0.5 ** (1.0 / 3.0)

InitialData = Union[np.ndarray, Callable[[float], complex]]


# ---------------- KAPPA ----------------
def kappa_integral(exponent: float, tol: float = 1e-13) -> float:
    """Integral of z^a / (1 + z^2) over (0, inf) for |a| < 1.

    z = 1/u folds [1, inf) onto (0, 1], giving the integral of
    (u^a + u^-a) / (1 + u^2) over (0, 1) with algebraic endpoint weights.
    """
    if not abs(exponent) < 1.0:
        raise ValueError(f"kappa integral diverges for exponent {exponent}")
    total = 0.0
    for power in (exponent, -exponent):
        value, _ = integrate.quad(
            lambda u: 1.0 / (1.0 + u * u),
            0.0,
            1.0,
            weight="alg",
            wvar=(power, 0.0),
            epsabs=tol,
            epsrel=1e-14,
        )
        total += value
    return total


def mellin_closed_form(exponent: float) -> float:
    """(pi/2) / cos(pi a / 2), the closed form of kappa_integral(a)."""
    return 0.5 * _PI / math.cos(0.5 * _PI * exponent)


@dataclass(frozen=True)
class KappaSet:
    v0: float
    kappa1: float
    kappa2: float
    kappa3: float
    kappa_eff: float = field(init=False)

    def __post_init__(self) -> None:
        values = (self.v0, self.kappa1, self.kappa2, self.kappa3)
        if not all(math.isfinite(v) and v > 0.0 for v in values):
            raise ValueError(f"kappa constants must be positive, got {values}")
        if self.kappa2**2 >= self.kappa1 * self.kappa3:
            raise ValueError("kappa2^2 < kappa1 kappa3 is violated")
        object.__setattr__(
            self, "kappa_eff", self.kappa1 - self.kappa2**2 / self.kappa3
        )

    @property
    def holder_ratio(self) -> float:
        return self.kappa2**2 / (self.kappa1 * self.kappa3)


def compute_kappas(v0: float) -> KappaSet:
    if not v0 > 0.0:
        raise ValueError(f"v0 must be positive, got {v0}")
    kappas = KappaSet(
        v0=v0,
        kappa1=1.2 * (_PI / v0) ** KAPPA_EXPONENT * kappa_integral(KAPPA_EXPONENT),
        kappa2=1.2 * kappa_integral(0.0),
        kappa3=1.2 * (v0 / _PI) ** KAPPA_EXPONENT * kappa_integral(-KAPPA_EXPONENT),
    )
    logging.info(
        f"kappa1={kappas.kappa1:.10g} kappa2={kappas.kappa2:.10g}"
        f" kappa3={kappas.kappa3:.10g} kappa={kappas.kappa_eff:.10g}"
    )
    return kappas


def limit_symbols(kappas: KappaSet, p: float, xi: float) -> Tuple[float, float, float]:
    a = abs(xi)
    return (
        -p - kappas.kappa1 * a**ALPHA,
        -kappas.kappa2 * a,
        -kappas.kappa3 * a**0.4,
    )


# ---------------- SYMBOLS ----------------
@dataclass(frozen=True)
class SymbolSample:
    eps: float
    p: float
    xi: float
    a1: complex
    a2: complex
    a3: complex
    F1: Optional[complex] = None
    F2: Optional[complex] = None


def _check_arguments(eps: float, p: float) -> None:
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if p < 0.0:
        raise ValueError(f"p must be nonnegative, got {p}")


def _u_breaks(profile: VProfile, eps: float, p: float, xi: float) -> List[float]:
    """Panel ends in u = k^(1/3) around the scales where V ~ eps |w'| |xi| or V ~ delta."""
    w0 = profile.v0 * _PI ** (5.0 / 3.0)
    scales = []
    if xi != 0.0:
        scales.append((eps * _PI * abs(xi) / w0) ** 0.6)
    if p > 0.0:
        scales.append((eps**ALPHA * p / w0) ** 0.6)
    breaks = {0.0, _U_MAX}
    for scale in scales:
        for factor in (0.25, 1.0, 4.0):
            u = (factor * scale) ** (1.0 / 3.0)
            if 0.0 < u < _U_MAX:
                breaks.add(u)
    return sorted(breaks)


def _symbol_integral(
    profile: VProfile, eps: float, p: float, xi: float, power: int, tol: float
) -> float:
    """Integral over the torus of (V/A - 1) V w^-power, A = delta + V + i eps w' xi.

    The halves k > 0 and k < 0 carry opposite transport terms, so their
    imaginary parts cancel and the real parts add up to
    -2 (delta (delta + V) + beta^2) / ((delta + V)^2 + beta^2) on (0, 1/2].
    """
    delta = eps**ALPHA * p

    def integrand(u: float) -> float:
        k = u * u * u
        v = profile(k)
        omega = math.sin(_PI * k)
        if omega == 0.0:
            return 0.0
        beta = eps * _PI * math.cos(_PI * k) * xi
        shifted = delta + v
        denominator = shifted * shifted + beta * beta
        if denominator == 0.0:
            return 0.0
        factor = -2.0 * (delta * shifted + beta * beta) / denominator
        return 3.0 * u * u * factor * v / omega**power

    breaks = _u_breaks(profile, eps, p, xi)
    panel_tol = tol / (len(breaks) - 1)
    return sum(
        adaptive_quad(integrand, a, b, panel_tol) for a, b in zip(breaks[:-1], breaks[1:])
    )


_PREFACTOR_POWERS = {0: -ALPHA, 1: -1.0, 2: -0.4}


def _a_eps(
    power: int, profile: VProfile, eps: float, p: float, xi: float, quad_tol: float
) -> complex:
    _check_arguments(eps, p)
    prefactor = eps ** _PREFACTOR_POWERS[power]
    value = prefactor * _symbol_integral(profile, eps, p, xi, power, quad_tol / prefactor)
    return complex(value, 0.0)


def a1_eps(
    profile: VProfile, eps: float, p: float, xi: float, quad_tol: float = DEFAULT_QUAD_TOL
) -> complex:
    return _a_eps(0, profile, eps, p, xi, quad_tol)


def a2_eps(
    profile: VProfile, eps: float, p: float, xi: float, quad_tol: float = DEFAULT_QUAD_TOL
) -> complex:
    return _a_eps(1, profile, eps, p, xi, quad_tol)


def a3_eps(
    profile: VProfile, eps: float, p: float, xi: float, quad_tol: float = DEFAULT_QUAD_TOL
) -> complex:
    return _a_eps(2, profile, eps, p, xi, quad_tol)


# ---------------- INITIAL DATA AND REMAINDERS ----------------
def _resolvent_weight(V, omega_prime, eps: float, p: float, xi: float):
    """V / (eps^(8/5) p + V + i eps w' xi)."""
    return V / (eps**ALPHA * p + V + 1j * eps * omega_prime * xi)


def _grid_functional(
    op: DiscreteOperator, f0: np.ndarray, eps: float, p: float, xi: float, power: int
) -> complex:
    nodes = op.nodes
    omega_prime = np.sign(nodes) * _PI * np.cos(_PI * nodes)
    weight = _resolvent_weight(np.asarray(op.table.V), omega_prime, eps, p, xi)
    return complex(op.bracket(weight * np.asarray(f0) * op.omega_inv**power))


def _callable_functional(
    profile: VProfile,
    f0: Callable[[float], complex],
    eps: float,
    p: float,
    xi: float,
    power: int,
    tol: float,
) -> complex:
    """Quadrature in u = |k|^(1/3) on each half of the torus."""
    total = 0j
    for side in (1.0, -1.0):
        for part in (np.real, np.imag):

            def integrand(u: float) -> float:
                k = side * u * u * u
                omega = abs(math.sin(_PI * k))
                if omega == 0.0:
                    return 0.0
                omega_prime = side * _PI * math.cos(_PI * k)
                weight = _resolvent_weight(profile(k), omega_prime, eps, p, xi)
                return float(part(3.0 * u * u * weight * f0(k) / omega**power))

            value = adaptive_quad(integrand, 0.0, _U_MAX, tol / 4.0)
            total += value if part is np.real else 1j * value
    return total


def F1_eps(
    source: Union[DiscreteOperator, VProfile],
    f0: InitialData,
    eps: float,
    p: float,
    xi: float,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> complex:
    """Integral of V/A f0; grid sums for sampled f0, quadrature for callables."""
    _check_arguments(eps, p)
    if isinstance(source, DiscreteOperator):
        return _grid_functional(source, f0, eps, p, xi, power=0)
    return _callable_functional(source, f0, eps, p, xi, 0, quad_tol)


def F2_eps(
    source: Union[DiscreteOperator, VProfile],
    f0: InitialData,
    eps: float,
    p: float,
    xi: float,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> complex:
    """eps^(3/5) times the integral of V/A f0 / w."""
    _check_arguments(eps, p)
    scale = eps**KAPPA_EXPONENT
    if isinstance(source, DiscreteOperator):
        return scale * _grid_functional(source, f0, eps, p, xi, power=1)
    return scale * _callable_functional(source, f0, eps, p, xi, 1, quad_tol / scale)


def remainders(
    op: DiscreteOperator, f_hat: np.ndarray, eps: float, p: float, xi: float
) -> Tuple[complex, complex]:
    """(R1, R2): the symbol weight (V/A - 1) applied to K(f - Pi f)."""
    _, projected = project_Pi(op, f_hat)
    defect = op.table.K @ ((f_hat - projected) * op.weights)
    nodes = op.nodes
    omega_prime = np.sign(nodes) * _PI * np.cos(_PI * nodes)
    weight = _resolvent_weight(op.Vdiag, omega_prime, eps, p, xi) - 1.0
    r1 = eps ** (-ALPHA) * op.bracket(weight * defect)
    r2 = eps**-1.0 * op.bracket(weight * defect * op.omega_inv)
    return complex(r1), complex(r2)


def R1_eps(op: DiscreteOperator, f_hat: np.ndarray, eps: float, p: float, xi: float) -> complex:
    return remainders(op, f_hat, eps, p, xi)[0]


def R2_eps(op: DiscreteOperator, f_hat: np.ndarray, eps: float, p: float, xi: float) -> complex:
    return remainders(op, f_hat, eps, p, xi)[1]


def sample_symbols(
    profile: VProfile,
    eps: float,
    p: float,
    xi: float,
    quad_tol: float = DEFAULT_QUAD_TOL,
    f0: Optional[Callable[[float], complex]] = None,
) -> SymbolSample:
    F1 = F2 = None
    if f0 is not None:
        F1 = F1_eps(profile, f0, eps, p, xi, quad_tol)
        F2 = F2_eps(profile, f0, eps, p, xi, quad_tol)
    return SymbolSample(
        eps=eps,
        p=p,
        xi=xi,
        a1=a1_eps(profile, eps, p, xi, quad_tol),
        a2=a2_eps(profile, eps, p, xi, quad_tol),
        a3=a3_eps(profile, eps, p, xi, quad_tol),
        F1=F1,
        F2=F2,
    )


# ---------------- STUDIES ----------------
def a3_lower_bound_check(
    profile: VProfile,
    eps: float,
    K: float,
    points: int = 6,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> float:
    """min over a geometric (p, xi) lattice of |a3| / (eps^(6/25) p^(2/5) + |xi|^(2/5))."""
    if eps * K > 1.0:
        raise ValueError(f"lower-bound scan needs eps K <= 1, got {eps * K}")
    lattice = np.geomspace(1e-3, K, points)
    margin = math.inf
    for p in lattice:
        for xi in lattice:
            value = abs(a3_eps(profile, eps, p, xi, quad_tol))
            margin = min(margin, value / (eps**0.24 * p**0.4 + xi**0.4))
    logging.debug(f"a3 lower-bound margin at eps={eps}: {margin:.6g}")
    return margin


@dataclass(frozen=True)
class ConvergenceReport:
    eps: Tuple[float, ...]
    errors: Tuple[Tuple[float, float, float], ...]
    slopes: Tuple[float, float, float]
    residuals: Tuple[float, float, float]

    def decreasing(self, index: int) -> bool:
        column = [row[index] for row in self.errors]
        return all(b < a for a, b in zip(column, column[1:]))


def convergence_study(
    profile: VProfile,
    kappas: KappaSet,
    p: float,
    xi: float,
    eps_list: Sequence[float],
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> ConvergenceReport:
    if len(eps_list) < 3 or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must hold at least 3 strictly decreasing values")
    limits = limit_symbols(kappas, p, xi)
    errors = []
    for eps in eps_list:
        sample = sample_symbols(profile, eps, p, xi, quad_tol)
        errors.append(
            tuple(
                abs(value - limit)
                for value, limit in zip((sample.a1, sample.a2, sample.a3), limits)
            )
        )
    slopes, residuals = [], []
    for index in range(3):
        slope, residual = fit_loglog(eps_list, [row[index] for row in errors])
        slopes.append(slope)
        residuals.append(residual)
    return ConvergenceReport(
        eps=tuple(eps_list),
        errors=tuple(errors),
        slopes=tuple(slopes),
        residuals=tuple(residuals),
    )
