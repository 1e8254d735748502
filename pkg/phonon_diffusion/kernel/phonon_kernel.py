# Global imports
from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator
from scipy.special import roots_legendre

from phonon_diffusion.kernel.parameters_kernel import (
    DEFAULT_QUAD_TOL,
    DEGENERACY_EXPONENT,
    KernelTable,
    NoPartnerError,
    QuadratureError,
    SingularCurveError,
    WaveGrid,
    WaveNumberDomainError,
    reduce_symmetric,
    reduce_unit,
)

Weight = Callable[[float], float]

_PI = math.pi
_QUAD_LIMIT = 200
_QUAD_EPSREL = 1e-12
_BRENT_XTOL = 1e-300
_BRENT_RTOL = 4.0 * np.finfo(float).eps
_RESONANCE_TOL = 1e-10

# Sampling used to bracket the roots of F_-(., k): a uniform sweep plus
# geometric points clustering at x = 0, where the small-k root sits near -k^3.
_GEOMETRIC = np.logspace(-1.0, -15.0, 113)
_ROOT_SAMPLES = np.unique(
    np.concatenate([np.linspace(-0.5, 0.5, 4097), _GEOMETRIC, -_GEOMETRIC])
)

_INNER_T, _INNER_W = roots_legendre(8)
_OUTER_T, _OUTER_W = roots_legendre(4)


class V0Estimate(NamedTuple):
    value: float
    uncertainty: float


# ---------------- DISPERSION ----------------
def omega(k):
    """Dispersion relation |sin(pi k)|."""
    values = np.abs(np.sin(_PI * np.asarray(reduce_symmetric(k))))
    return values if np.ndim(k) else float(values)


def omega_prime(k):
    """sgn(k) pi cos(pi k) on the symmetric view; undefined at k = 0 mod 1."""
    ks = np.asarray(reduce_symmetric(k))
    if np.any(ks == 0.0):
        raise WaveNumberDomainError("omega' is discontinuous at k = 0 mod 1")
    values = np.sign(ks) * _PI * np.cos(_PI * ks)
    return values if np.ndim(k) else float(values)


# ---------------- SCALAR KERNEL PIECES (symmetric coordinates) ----------------
def _omega_s(x: float) -> float:
    return abs(math.sin(_PI * x))


def _c_s(x: float) -> float:
    # cos(pi k) of the unit-interval representative of x
    return math.cos(_PI * x) if x >= 0.0 else -math.cos(_PI * x)


def _cos_sum_s(k: float, x: float) -> float:
    half_sum = 0.5 * _PI * (k + x)
    half_diff = 0.5 * _PI * (k - x)
    sign = 1.0 if k >= 0.0 else -1.0
    if (k >= 0.0) == (x >= 0.0):
        return sign * 2.0 * math.cos(half_sum) * math.cos(half_diff)
    return -sign * 2.0 * math.sin(half_sum) * math.sin(half_diff)


def _fm_s(k: float, x: float) -> float:
    s = _cos_sum_s(k, x)
    return s * s - 4.0 * _omega_s(k) * _omega_s(x)


def _fp_s(k: float, x: float) -> float:
    s = _cos_sum_s(k, x)
    return s * s + 4.0 * _omega_s(k) * _omega_s(x)


def _fm_prime_s(k: float, x: float) -> float:
    """d/dx F_-(k, x), using dC/dx = -pi omega(x) and omega'(x) = pi C(x)."""
    s = _cos_sum_s(k, x)
    return -2.0 * _PI * s * _omega_s(x) - 4.0 * _PI * _omega_s(k) * _c_s(x)


def _kernel_s(k: float, x: float) -> float:
    prod = 4.0 * _omega_s(k) * _omega_s(x)
    if prod == 0.0:
        return 0.0
    s = _cos_sum_s(k, x)
    fp = s * s + prod
    fm = s * s - prod
    sp = math.sqrt(fp)
    if fm > 0.0:
        sm = math.sqrt(fm)
        # 4 w w' (1/sqrt(F+) - 1/sqrt(F-)) without cancellation
        return -2.0 * prod * prod / (sp * sm * (sp + sm))
    return prod / sp


def _kernel_plus_s(k: float, x: float) -> float:
    prod = 4.0 * _omega_s(k) * _omega_s(x)
    if prod == 0.0:
        return 0.0
    return prod / math.sqrt(_fp_s(k, x))


# ---------------- VECTOR KERNEL PIECES ----------------
def _cos_sum_vec(k, x):
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    half_sum = 0.5 * _PI * (k + x)
    half_diff = 0.5 * _PI * (k - x)
    sign = np.where(k >= 0.0, 1.0, -1.0)
    same = sign * 2.0 * np.cos(half_sum) * np.cos(half_diff)
    opposite = -sign * 2.0 * np.sin(half_sum) * np.sin(half_diff)
    return np.where((k >= 0.0) == (x >= 0.0), same, opposite)


def _f_pair_vec(k, x) -> Tuple[np.ndarray, np.ndarray]:
    s = _cos_sum_vec(k, x)
    prod = 4.0 * np.abs(np.sin(_PI * np.asarray(k))) * np.abs(np.sin(_PI * x))
    return s * s + prod, s * s - prod


def _kernel_vec(k, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = _cos_sum_vec(k, x)
    prod = 4.0 * np.abs(np.sin(_PI * np.asarray(k))) * np.abs(np.sin(_PI * x))
    fp = s * s + prod
    fm = s * s - prod
    with np.errstate(divide="ignore", invalid="ignore"):
        sp = np.sqrt(fp)
        sm = np.sqrt(np.maximum(fm, 0.0))
        inside = -2.0 * prod * prod / (sp * sm * (sp + sm))
        outside = prod / sp
    values = np.where(fm > 0.0, inside, outside)
    return np.where(prod == 0.0, 0.0, values)


# ---------------- PUBLIC KERNEL ----------------
def f_plus(k, kp):
    """F+(k, k') = (cos pi k + cos pi k')^2 + 4 sin pi k sin pi k' on [0, 1)^2."""
    values = _f_pair_vec(reduce_symmetric(k), reduce_symmetric(kp))[0]
    return values if np.ndim(values) else float(values)


def f_minus(k, kp):
    """F-(k, k') = (cos pi k + cos pi k')^2 - 4 sin pi k sin pi k' on [0, 1)^2."""
    values = _f_pair_vec(reduce_symmetric(k), reduce_symmetric(kp))[1]
    return values if np.ndim(values) else float(values)


def kernel_K(k: float, kp: float) -> float:
    """K(k, k') = w(k) w(k') (4/sqrt(F+) - 4 1(F- > 0)/sqrt(F-))."""
    ks, xs = reduce_symmetric(k), reduce_symmetric(kp)
    if _omega_s(ks) * _omega_s(xs) > 0.0 and _fm_s(ks, xs) == 0.0:
        raise SingularCurveError(f"K evaluated on F_- = 0 at ({k}, {kp})")
    return _kernel_s(ks, xs)


def f_minus_roots(k: float) -> np.ndarray:
    """Roots of F_-(., k) in symmetric coordinates, sorted ascending."""
    ks = reduce_symmetric(k)
    if ks == 0.0:
        return np.empty(0)
    values = _f_pair_vec(ks, _ROOT_SAMPLES)[1]
    roots: List[float] = []
    for i in range(len(_ROOT_SAMPLES) - 1):
        a, b = _ROOT_SAMPLES[i], _ROOT_SAMPLES[i + 1]
        if a < 0.0 <= b:
            # C(x) jumps at x = 0, F_- stays positive on both sides
            continue
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(
                optimize.brentq(
                    lambda x: _fm_s(ks, x),
                    a,
                    b,
                    xtol=_BRENT_XTOL,
                    rtol=_BRENT_RTOL,
                    maxiter=400,
                )
            )
    return np.array(sorted(set(roots)))


# ---------------- RESONANCE GEOMETRY ----------------
def resonance_residual(k: float, kp: float, k1: float) -> float:
    return abs(
        _omega_s(reduce_symmetric(k))
        + _omega_s(reduce_symmetric(k1))
        - _omega_s(reduce_symmetric(kp))
        - _omega_s(reduce_symmetric(k + k1 - kp))
    )


def resonance_partner(k: float, kp: float) -> float:
    """Non-trivial k1 with w(k) + w(k1) = w(k') + w(k + k1 - k').

    Closed form h(k,k') = (k'-k)/2 + arcsin(tan(pi|k'-k|/2) cos(pi(k+k')/2))/pi
    evaluated on unit-interval representatives, with bracketed root finding
    as fallback.
    """
    ku, kpu = reduce_unit(k), reduce_unit(kp)
    if reduce_symmetric(kpu - ku) == 0.0:
        return 0.0
    diff = kpu - ku
    arg = math.tan(0.5 * _PI * abs(diff)) * math.cos(0.5 * _PI * (ku + kpu))
    if math.isfinite(arg) and abs(arg) <= 1.0:
        k1 = reduce_symmetric(0.5 * diff + math.asin(arg) / _PI)
        if resonance_residual(k, kp, k1) <= _RESONANCE_TOL:
            return k1
    logging.debug(f"Closed-form partner rejected at ({k}, {kp}), bracketing")
    return _partner_by_bracketing(k, kp)


def _partner_by_bracketing(k: float, kp: float) -> float:
    def gap(k1: float) -> float:
        return (
            _omega_s(reduce_symmetric(k))
            + _omega_s(reduce_symmetric(k1))
            - _omega_s(reduce_symmetric(kp))
            - _omega_s(reduce_symmetric(k + k1 - kp))
        )

    samples = np.linspace(-0.5, 0.5, 2049)
    spacing = samples[1] - samples[0]
    values = np.array([gap(x) for x in samples])
    trivial = reduce_symmetric(kp)
    for i in range(len(samples) - 1):
        a, b = samples[i], samples[i + 1]
        center = reduce_symmetric(0.5 * (a + b) - trivial)
        if abs(center) <= 2.0 * spacing:
            continue
        if values[i] == 0.0:
            candidate = float(a)
        elif values[i] * values[i + 1] < 0.0:
            candidate = optimize.brentq(gap, a, b, xtol=1e-15, rtol=_BRENT_RTOL)
        else:
            continue
        if resonance_residual(k, kp, candidate) <= _RESONANCE_TOL:
            return reduce_symmetric(candidate)
    raise NoPartnerError(f"No non-trivial resonance partner for ({k}, {kp})")


def three_phonon_gap(grid: WaveGrid) -> Tuple[float, Tuple[float, float]]:
    """min over grid pairs of w(k) + w(k1) - w(k + k1) and its location."""
    k = grid.nodes[:, None]
    k1 = grid.nodes[None, :]
    gap = omega(k) + omega(k1) - omega(k + k1)
    i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
    return float(gap[i, j]), (float(grid.nodes[i]), float(grid.nodes[j]))


# ---------------- ADAPTIVE QUADRATURE OF K(k, .) ----------------
def adaptive_quad(func: Weight, a: float, b: float, tol: float) -> float:
    result = integrate.quad(
        func,
        a,
        b,
        epsabs=tol,
        epsrel=_QUAD_EPSREL,
        limit=_QUAD_LIMIT,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > tol:
        raise QuadratureError(
            f"quadrature on [{a:.6g}, {b:.6g}] stopped at error {abserr:.3e}"
            f" (requested {tol:.3e})",
            achieved_tol=abserr,
        )
    return value


def _monotone_end(ks: float, root: float, toward: float) -> float:
    """Far end of a stretch from `root` on which F_- increases strictly."""
    direction = 1.0 if toward > root else -1.0
    length = abs(toward - root)
    fractions = np.linspace(0.0, 1.0, 17)[1:]
    while length > 1e-15 * max(1.0, abs(root)):
        xs = root + direction * length * fractions
        values = _f_pair_vec(ks, xs)[1]
        if values[0] > 0.0 and np.all(np.diff(values) > 0.0):
            return root + direction * length if length < abs(toward - root) else toward
        length *= 0.5
    raise QuadratureError(
        f"F_- not monotone next to root {root:.6g} for k={ks:.6g}",
        achieved_tol=math.inf,
    )


def _singular_panel(
    ks: float, root: float, end: float, weight: Weight, tol: float
) -> float:
    """Integral of K(ks, .) * weight between a root of F_- and `end`.

    The 1/sqrt(F_-) part is integrated in u = sqrt(F_-), where
    dx = 2u du / F_-'(x) and the integrand becomes 2 w w' weight / |F_-'|.
    """
    lo, hi = min(root, end), max(root, end)
    plus_part = adaptive_quad(lambda x: _kernel_plus_s(ks, x) * weight(x), lo, hi, tol)

    f_root = max(_fm_s(ks, root), 0.0)
    u_max = math.sqrt(_fm_s(ks, end))
    omega_k = _omega_s(ks)

    def x_of_u(u: float) -> float:
        target = u * u
        if target <= f_root:
            return root
        return optimize.brentq(
            lambda x: _fm_s(ks, x) - target, lo, hi, xtol=_BRENT_XTOL, rtol=_BRENT_RTOL
        )

    def integrand(u: float) -> float:
        x = x_of_u(u)
        return 8.0 * omega_k * _omega_s(x) * weight(x) / abs(_fm_prime_s(ks, x))

    minus_part = adaptive_quad(integrand, 0.0, u_max, tol)
    return plus_part - minus_part


def _panel_edges(ks: float, roots: Sequence[float]) -> List[float]:
    edges = {-0.5, 0.5, 0.0}
    edges.update(float(r) for r in roots)
    # F+ is smallest near x = -k, which matters when |k| is small
    for factor in (0.5, 1.0, 2.0):
        candidate = -factor * ks
        if -0.5 < candidate < 0.5:
            edges.add(candidate)
    return sorted(edges)


def _row_integral(ks: float, weight: Weight, quad_tol: float) -> float:
    roots = f_minus_roots(ks)
    root_set = set(float(r) for r in roots)
    edges = _panel_edges(ks, roots)
    panels = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    tol = quad_tol / (3.0 * len(panels))

    def regular(x: float) -> float:
        return _kernel_s(ks, x) * weight(x)

    total = 0.0
    for a, b in panels:
        middle = 0.5 * (a + b)
        left_root, right_root = a in root_set, b in root_set
        if _fm_s(ks, middle) <= 0.0 or not (left_root or right_root):
            total += adaptive_quad(regular, a, b, tol)
            continue
        lo, hi = a, b
        if left_root:
            lo = _monotone_end(ks, a, middle if right_root else b)
            total += _singular_panel(ks, a, lo, weight, tol)
        if right_root:
            hi = _monotone_end(ks, b, middle if left_root else a)
            total += _singular_panel(ks, b, hi, weight, tol)
        if hi > lo:
            total += adaptive_quad(regular, lo, hi, tol)
    return total


def _one(_: float) -> float:
    return 1.0


def v_of_k(k: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Collision frequency V(k) = integral of K(k', k) over the torus."""
    ks = reduce_symmetric(k)
    if ks == 0.0:
        raise WaveNumberDomainError("V is evaluated away from k = 0 mod 1")
    value = _row_integral(ks, _one, quad_tol)
    if value < 0.0:
        logging.debug(f"V({k}) = {value:.3e} clipped to 0")
        value = 0.0
    return value


def apply_kernel(
    k: float, f: Weight, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Integral of K(k, x) f(x) dx for a callable f of the symmetric coordinate."""
    ks = reduce_symmetric(k)
    if ks == 0.0:
        return 0.0
    return _row_integral(ks, f, quad_tol)


def apply_L_continuous(
    k: float, f: Weight, quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """L f(k) = integral of K(k, x) (f(x) - f(k)) dx, grid free."""
    ks = reduce_symmetric(k)
    if ks == 0.0:
        return 0.0
    fk = f(ks)
    return _row_integral(ks, lambda x: f(x) - fk, quad_tol)


def degeneracy_slope(
    k_values: Sequence[float], quad_tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Least-squares slope of log V against log k."""
    ks = np.asarray(k_values, dtype=float)
    vs = np.array([v_of_k(k, quad_tol) for k in ks])
    slope, _ = np.polyfit(np.log(ks), np.log(vs), 1)
    return float(slope)


# ---------------- GALERKIN KERNEL MATRIX ----------------
def _gauss(ks: float, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    xs = 0.5 * (hi + lo) + half * _INNER_T
    return half * float(_kernel_vec(ks, xs) @ _INNER_W)


def _gauss_from_root(ks: float, root: float, lo: float, hi: float) -> float:
    """Gauss rule in t with x = root +- t^2, removing 1/sqrt(x - root)."""
    direction = 1.0 if lo >= root else -1.0
    d_near, d_far = sorted((abs(lo - root), abs(hi - root)))
    t_lo, t_hi = math.sqrt(d_near), math.sqrt(d_far)
    half = 0.5 * (t_hi - t_lo)
    ts = 0.5 * (t_hi + t_lo) + half * _INNER_T
    xs = reduce_symmetric(root + direction * ts * ts)
    return half * float((_kernel_vec(ks, xs) * 2.0 * ts) @ _INNER_W)


def _root_images(roots: np.ndarray) -> np.ndarray:
    return np.concatenate([roots - 1.0, roots, roots + 1.0])


def _special_cell(
    ks: float, lo: float, hi: float, roots: np.ndarray, h: float
) -> float:
    images = _root_images(roots)
    cuts = [lo] + [float(r) for r in images if lo < r < hi] + [hi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        middle = 0.5 * (a + b)
        if _fm_s(ks, reduce_symmetric(middle)) <= 0.0:
            total += _gauss(ks, a, b)
            continue
        anchor = _nearest_anchor(a, b, images, h)
        if anchor is None:
            total += _gauss(ks, a, b)
        else:
            total += _gauss_from_root(ks, anchor, a, b)
    return total


def _nearest_anchor(
    a: float, b: float, images: np.ndarray, h: float
) -> Optional[float]:
    """Closest root image within one cell of [a, b], not across x = 0."""
    best, best_dist = None, h
    for r in images:
        if a <= r <= b:
            dist = 0.0
        else:
            dist = a - r if r < a else r - b
        if dist > best_dist:
            continue
        lo, hi = (r, a) if r < a else (b, r)
        if lo < 0.0 < hi or np.any((images > lo) & (images < hi)):
            continue
        best, best_dist = float(r), dist
    return best


def _cell_averages(ks: float, grid: WaveGrid) -> np.ndarray:
    """(1/h) times the integral of K(ks, .) over every cell."""
    h = grid.h
    xs = grid.nodes[:, None] + 0.5 * h * _INNER_T[None, :]
    averages = 0.5 * (_kernel_vec(ks, xs) @ _INNER_W)
    roots = f_minus_roots(ks)
    if roots.size:
        edges = grid.edges
        touched = set()
        for r in roots:
            j0 = int(min(max(math.floor((r + 0.5) / h), 0), grid.n - 1))
            touched.update(((j0 - 1) % grid.n, j0, (j0 + 1) % grid.n))
        for j in sorted(touched):
            averages[j] = _special_cell(ks, edges[j], edges[j + 1], roots, h) / h
    return averages


def _galerkin_row(grid: WaveGrid, i: int) -> np.ndarray:
    center = grid.nodes[i]
    row = np.zeros(grid.n)
    for t, w in zip(_OUTER_T, _OUTER_W):
        row += 0.5 * w * _cell_averages(center + 0.5 * grid.h * t, grid)
    return row


def assemble_kernel(
    grid: WaveGrid,
    quad_tol: float = DEFAULT_QUAD_TOL,
    workers: int = 1,
) -> KernelTable:
    """Cell-averaged kernel matrix, collision frequency and degeneracy profile."""
    if grid.n < 16 or grid.n % 2:
        raise ValueError(f"kernel assembly needs an even n >= 16, got n={grid.n}")
    n = grid.n
    half = n // 2
    started = time.perf_counter()
    logging.info(f"Assembling kernel table n={n} quad_tol={quad_tol:.1e}")

    def build(i: int) -> Tuple[np.ndarray, float]:
        try:
            v_value = v_of_k(grid.nodes[i], quad_tol)
        except QuadratureError as err:
            raise err.with_row(i) from err
        return _galerkin_row(grid, i), v_value

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(build, range(half)))

    K = np.empty((n, n))
    V = np.empty(n)
    for i, (row, v_value) in enumerate(rows):
        # central symmetry K(-k, -k') = K(k, k')
        K[i] = row
        K[n - 1 - i] = row[::-1]
        V[i] = V[n - 1 - i] = v_value
    K = 0.5 * (K + K.T)

    ratio = V / np.abs(np.sin(_PI * grid.nodes)) ** DEGENERACY_EXPONENT
    table = KernelTable(
        grid=grid,
        K=K,
        V=V,
        v0=math.nan,
        c1=float(np.min(ratio)),
        c2=float(np.max(ratio)),
        quad_tol=quad_tol,
    )
    estimate = estimate_v0(table)
    table = dataclasses.replace(
        table, v0=estimate.value, v0_uncertainty=estimate.uncertainty
    )
    logging.info(
        f"Kernel table n={n} ready in {time.perf_counter() - started:.1f}s"
        f" (v0={table.v0:.6g}, c1={table.c1:.6g}, c2={table.c2:.6g})"
    )
    return table


def estimate_v0(table: KernelTable) -> V0Estimate:
    """Extrapolate |sin pi k|^(-5/3) V(k) to k = 0.

    Uses the nodes k = 3^m h/2 (all grid nodes) and Aitken's delta-squared
    process; the uncertainty is the spread of the last two extrapolants.
    """
    n = table.n
    positive = table.V[n // 2 :]
    nodes = table.grid.nodes[n // 2 :]
    samples = []
    m = 3
    while m >= 0:
        j = (3**m - 1) // 2
        if j < positive.size:
            samples.append(positive[j] / math.sin(_PI * nodes[j]) ** DEGENERACY_EXPONENT)
        m -= 1
    if len(samples) < 3:
        return V0Estimate(samples[-1], math.inf)

    steps = np.diff(samples)
    if np.any(np.sign(steps) != np.sign(steps[0])):
        logging.warning(
            f"Non-monotone degeneracy tail {np.round(samples, 8)}, using the value"
            " at the smallest node"
        )
        return V0Estimate(samples[-1], abs(samples[-1] - samples[-2]))

    extrapolants = []
    for s0, s1, s2 in zip(samples, samples[1:], samples[2:]):
        denominator = (s2 - s1) - (s1 - s0)
        extrapolants.append(s2 if denominator == 0.0 else s2 - (s2 - s1) ** 2 / denominator)
    value = extrapolants[-1]
    if not value > 0.0:
        logging.warning(f"Aitken extrapolant {value} rejected, using last sample")
        return V0Estimate(samples[-1], abs(samples[-1] - samples[-2]))
    spread = (
        abs(extrapolants[-1] - extrapolants[-2])
        if len(extrapolants) > 1
        else abs(value - samples[-1])
    )
    return V0Estimate(float(value), float(spread))


# ---------------- CONTINUOUS COLLISION-FREQUENCY MODEL ----------------
class VProfile:
    """V(k) = g(|k|) |sin pi k|^(5/3) with g a monotone cubic through the table.

    g interpolates V/|sin pi k|^(5/3) at the positive nodes and is pinned to v0
    at k = 0, so the model keeps the exact degeneracy near the origin.
    """

    def __init__(self, table: KernelTable) -> None:
        half = table.n // 2
        nodes = table.grid.nodes[half:]
        ratios = table.V[half:] / np.sin(_PI * nodes) ** DEGENERACY_EXPONENT
        self.v0 = float(table.v0)
        self._g = PchipInterpolator(
            np.concatenate([[0.0], nodes, [0.5]]),
            np.concatenate([[self.v0], ratios, [ratios[-1]]]),
            extrapolate=True,
        )

    def ratio(self, k):
        values = self._g(np.abs(np.asarray(reduce_symmetric(k))))
        return values if np.ndim(k) else float(values)

    def __call__(self, k):
        ks = np.abs(np.asarray(reduce_symmetric(k)))
        values = self._g(ks) * np.sin(_PI * ks) ** DEGENERACY_EXPONENT
        return values if np.ndim(k) else float(values)

    def weighted_integral(
        self, a: float, b: float, power: float = 0.0, tol: float = 1e-12
    ) -> float:
        """Integral of V(k) w(k)^(-power) over [a, b] inside (-1/2, 1/2]."""
        total = 0.0
        for lo, hi in ((a, min(b, 0.0)), (max(a, 0.0), b)):
            if hi <= lo:
                continue
            # k = u^3 keeps |k|^(5/3 - power) smooth for power up to 2
            u_lo = math.copysign(abs(lo) ** (1.0 / 3.0), lo)
            u_hi = math.copysign(abs(hi) ** (1.0 / 3.0), hi)

            def integrand(u: float) -> float:
                k = u * u * u
                sine = abs(math.sin(_PI * k))
                if sine == 0.0:
                    return 0.0
                return 3.0 * u * u * float(self._g(abs(k))) * sine ** (
                    DEGENERACY_EXPONENT - power
                )

            total += adaptive_quad(integrand, u_lo, u_hi, tol)
        return total
