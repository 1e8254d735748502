import math
import unittest

import numpy as np

from phonon_diffusion.kernel import WaveGrid, omega
from phonon_diffusion.linear import (
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

TOL = 1e-9


def harmonic(k: float) -> float:
    return math.cos(2.0 * math.pi * k) + 0.3 * math.sin(2.0 * math.pi * k)


def one(_: float) -> float:
    return 1.0


def inverse_omega(k: float) -> float:
    return 1.0 / omega(k)


def two_bumps(k: float) -> float:
    return math.exp(1.5 * math.cos(2.0 * math.pi * (k - 0.2))) + math.exp(
        1.5 * math.cos(2.0 * math.pi * (k + 0.25))
    )


class DensityTest(unittest.TestCase):
    def test_equilibrium_parameters(self) -> None:
        with self.assertRaises(ValueError):
            EquilibriumParams(-0.1, 1.0)
        with self.assertRaises(ValueError):
            EquilibriumParams(0.0, 0.0)

    def test_equilibrium_factors(self) -> None:
        W = PhononDensity.equilibrium(0.0, 2.0)
        self.assertAlmostEqual(W(0.3), 1.0 / (2.0 * omega(0.3)))
        self.assertEqual(W.omega_weighted(0.3), 0.5)
        shifted = PhononDensity.equilibrium(0.5, 1.0)
        self.assertAlmostEqual(shifted.reciprocal(0.2), 0.5 + omega(0.2))

    def test_from_samples(self) -> None:
        grid = WaveGrid(16)
        values = 1.0 + 0.2 * np.cos(2.0 * np.pi * grid.nodes)
        W = PhononDensity.from_samples(grid, values)
        self.assertTrue(np.allclose(W.on_grid(grid), values, rtol=1e-12))
        self.assertAlmostEqual(W(grid.nodes[3] + 1.0), values[3], places=12)
        with self.assertRaises(ValueError):
            PhononDensity.from_samples(grid, -values)


class CollisionOperatorTest(unittest.TestCase):
    def test_equilibrium_is_stationary(self) -> None:
        for a, b in [(0.0, 1.0), (0.3, 0.5)]:
            W = PhononDensity.equilibrium(a, b)
            for k in (-0.23, 0.13, 0.41):
                self.assertLess(abs(evaluate_C(W, k, TOL)), 10.0 * TOL)

    def test_departure_from_equilibrium_is_seen(self) -> None:
        W = PhononDensity.from_function(lambda k: math.exp(0.4 * harmonic(k)))
        departure = max(abs(evaluate_C(W, k, TOL)) for k in (-0.23, 0.13, 0.41))
        self.assertGreater(departure, 100.0 * TOL)

    def test_entropy_production_nonnegative(self) -> None:
        grid = WaveGrid(16)
        W = PhononDensity.from_function(lambda k: math.exp(0.4 * harmonic(k)))
        self.assertGreaterEqual(entropy_production(W, grid, TOL), -1e-8)

    def test_entropy_production_positive_off_equilibrium(self) -> None:
        W = PhononDensity.from_function(two_bumps)
        self.assertGreater(entropy_production(W, WaveGrid(16), TOL), 100.0 * TOL)

    def test_conservation_improves_under_refinement(self) -> None:
        W = PhononDensity.from_function(lambda k: math.exp(0.4 * harmonic(k)))
        coarse = conservation_check(W, WaveGrid(8), TOL)
        fine = conservation_check(W, WaveGrid(16), TOL)
        self.assertLess(max(map(abs, fine)), max(map(abs, coarse)))
        self.assertLess(max(map(abs, fine)), 1e-4)

    def test_invariants_in_linearization(self) -> None:
        for k in (-0.31, 0.17):
            self.assertLess(abs(linearized_C(one, k, quad_tol=TOL)), 1e-6)
            self.assertLess(abs(linearized_C(inverse_omega, k, quad_tol=TOL)), 1e-6)

    def test_difference_quotient_tends_to_derivative(self) -> None:
        k = 0.27
        target = linearized_C(harmonic, k, quad_tol=TOL)
        quotient = perturbed_difference_quotient(harmonic, k, 1e-4, quad_tol=TOL)
        self.assertLess(abs(quotient - target), 1e-2 * max(abs(target), 1.0))

    def test_temperature_scaling(self) -> None:
        k = 0.27
        base = linearized_C(harmonic, k, T_bar=1.0, quad_tol=TOL)
        hot = linearized_C(harmonic, k, T_bar=2.0, quad_tol=TOL)
        self.assertAlmostEqual(hot, 4.0 * base, places=9)

    def test_quadratic_form(self) -> None:
        self.assertLess(abs(quadratic_Q(one, one, 0.21, TOL)), 1e-14)
        forward = quadratic_Q(harmonic, one, 0.21, TOL)
        backward = quadratic_Q(one, harmonic, 0.21, TOL)
        self.assertAlmostEqual(forward, backward, places=10)


class ResonanceRootTest(unittest.TestCase):
    def test_only_trivial_and_partner_roots(self) -> None:
        for k, k2 in ((0.13, 0.3), (-0.2, 0.35), (0.41, -0.07)):
            with self.subTest(k=k, k2=k2):
                self.assertEqual(extra_resonance_roots(k, k2, samples=2001), [])


class CalibrationTest(unittest.TestCase):
    def test_normalization_constant(self) -> None:
        ks = (-0.37, -0.12, 0.08, 0.33)
        constant = calibrate_constant(harmonic, ks, TOL)
        self.assertAlmostEqual(constant * 2.0 * math.pi, 1.0, delta=0.05)

    def test_consistency_requires_decreasing_eps(self) -> None:
        with self.assertRaises(ValueError):
            linearization_consistency(harmonic, [1e-3, 1e-2], 1.0, (0.2,), quad_tol=TOL)


if __name__ == "__main__":
    unittest.main()
