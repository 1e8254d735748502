import unittest

import numpy as np

from phonon_diffusion.limit import (
    DiffusionParams,
    SpectrumSymmetryError,
    compute_kappas,
    evolve_hat,
    forward_transform,
    real_space_render,
    slaved_S_hat,
    wave_numbers,
    x_grid,
)


class DiffusionParamsTest(unittest.TestCase):
    def setUp(self) -> None:
        self.kappas = compute_kappas(1.0)

    def test_rate_scales_with_temperature(self) -> None:
        cold = DiffusionParams(self.kappas, T_bar=1.0)
        hot = DiffusionParams(self.kappas, T_bar=2.0)
        self.assertAlmostEqual(cold.rate, self.kappas.kappa_eff)
        self.assertAlmostEqual(hot.rate, cold.rate * 2.0**-1.2)

    def test_rejects_nonpositive_temperature(self) -> None:
        with self.assertRaises(ValueError):
            DiffusionParams(self.kappas, T_bar=0.0)


class EvolutionTest(unittest.TestCase):
    def setUp(self) -> None:
        self.kappas = compute_kappas(1.0)
        self.params = DiffusionParams(self.kappas)
        self.xi = wave_numbers(16, 64.0)
        self.T0 = np.random.default_rng(3).normal(size=16) + 0j

    def test_wave_numbers(self) -> None:
        self.assertEqual(self.xi[0], 0.0)
        self.assertAlmostEqual(self.xi[1], 2.0 * np.pi / 64.0)
        self.assertAlmostEqual(self.xi[-1], -2.0 * np.pi / 64.0)

    def test_identity_at_time_zero(self) -> None:
        start = evolve_hat(self.params, self.T0, self.xi, 0.0)
        self.assertTrue(np.array_equal(start, self.T0))

    def test_zero_mode_is_conserved(self) -> None:
        later = evolve_hat(self.params, self.T0, self.xi, 5.0)
        self.assertEqual(later[0], self.T0[0])
        self.assertTrue(np.all(np.abs(later[1:]) <= np.abs(self.T0[1:])))

    def test_semigroup(self) -> None:
        once = evolve_hat(self.params, self.T0, self.xi, 1.5)
        half = evolve_hat(self.params, self.T0, self.xi, 0.5)
        twice = evolve_hat(self.params, half, self.xi, 1.0)
        self.assertTrue(np.allclose(once, twice, rtol=1e-13))

    def test_decay_rate(self) -> None:
        later = evolve_hat(self.params, self.T0, self.xi, 2.0)
        expected = np.exp(-self.params.rate * abs(self.xi[3]) ** 1.6 * 2.0)
        self.assertAlmostEqual(abs(later[3] / self.T0[3]), expected, places=13)

    def test_rejects_negative_time(self) -> None:
        with self.assertRaises(ValueError):
            evolve_hat(self.params, self.T0, self.xi, -1.0)


class SlavingTest(unittest.TestCase):
    def setUp(self) -> None:
        self.kappas = compute_kappas(1.0)
        self.xi = wave_numbers(8, 10.0)

    def test_slaving_ratio(self) -> None:
        T = np.ones(8, dtype=complex)
        S = slaved_S_hat(self.kappas, T, self.xi)
        self.assertEqual(S[0], 0.0)
        ratio = self.kappas.kappa2 / self.kappas.kappa3 * abs(self.xi[2]) ** 0.6
        self.assertAlmostEqual(S[2].real, -ratio)
        self.assertTrue(np.allclose(slaved_S_hat(self.kappas, T, self.xi, sign=1), -S))
        with self.assertRaises(ValueError):
            slaved_S_hat(self.kappas, T, self.xi, sign=0)

    def test_slaving_reduces_first_symbol(self) -> None:
        # eliminating S from a2 T + a3 S = 0 leaves a1 T + a2 S = -kappa |xi|^(8/5) T
        kappas = self.kappas
        for xi in (0.3, 1.0, 2.5):
            ratio = kappas.kappa2 / kappas.kappa3 * xi**0.6
            combined = -kappas.kappa1 * xi**1.6 + kappas.kappa2 * xi * ratio
            self.assertAlmostEqual(combined, -kappas.kappa_eff * xi**1.6, places=12)


class TransformTest(unittest.TestCase):
    def test_single_mode(self) -> None:
        x = x_grid(16, 8.0)
        xi = wave_numbers(16, 8.0)
        coefficients = forward_transform(np.cos(xi[2] * x), 8.0)
        self.assertAlmostEqual(coefficients[2].real, 0.5)
        self.assertAlmostEqual(coefficients[-2].real, 0.5)
        self.assertLess(np.max(np.abs(np.delete(coefficients, [2, 14]))), 1e-14)

    def test_render_inverts_forward_transform(self) -> None:
        samples = np.random.default_rng(9).normal(size=32)
        rendered = real_space_render(forward_transform(samples, 4.0), 4.0)
        self.assertTrue(np.allclose(rendered, samples, atol=1e-13))

    def test_render_rejects_complex_fields(self) -> None:
        spectrum = np.zeros(8, dtype=complex)
        spectrum[1] = 1.0
        with self.assertRaises(SpectrumSymmetryError):
            real_space_render(spectrum, 1.0)

    def test_rejects_bad_box(self) -> None:
        with self.assertRaises(ValueError):
            forward_transform(np.ones(8), 0.0)


if __name__ == "__main__":
    unittest.main()
