import functools
import unittest

import numpy as np

from phonon_diffusion.kernel import KernelTable, WaveGrid, assemble_kernel
from phonon_diffusion.linear import (
    DiagonalMode,
    DiscreteOperator,
    InvalidTableError,
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


def cosine_table(n: int = 16) -> KernelTable:
    """Nonnegative kernel 1 + cos 2 pi (k - k'), whose row sums are exactly 1."""
    grid = WaveGrid(n)
    nodes = grid.nodes
    K = 1.0 + np.cos(2.0 * np.pi * (nodes[:, None] - nodes[None, :]))
    V = np.abs(np.sin(np.pi * nodes)) ** (5.0 / 3.0)
    return KernelTable(grid=grid, K=K, V=V, v0=1.0, c1=1.0, c2=1.0, quad_tol=1e-10)


class DiscreteOperatorTest(unittest.TestCase):
    def setUp(self) -> None:
        self.op = DiscreteOperator(cosine_table())
        self.rng = np.random.default_rng(7)

    def test_row_sum_diagonal(self) -> None:
        self.assertTrue(np.allclose(self.op.Vdiag, 1.0, atol=1e-14))
        self.assertLess(np.max(np.abs(apply_L(self.op, np.ones(16)))), 1e-14)

    def test_analytic_diagonal(self) -> None:
        op = DiscreteOperator(cosine_table(), mode=DiagonalMode.ANALYTIC)
        self.assertTrue(np.array_equal(op.Vdiag, op.table.V))

    def test_matrix_matches_apply(self) -> None:
        f = self.rng.normal(size=16)
        self.assertTrue(np.allclose(self.op.matrix() @ f, apply_L(self.op, f), atol=1e-13))

    def test_known_spectrum(self) -> None:
        # constants -> 0, the first harmonic -> -1/2, everything else -> -1
        values = np.sort(np.linalg.eigvalsh(self.op.matrix()))
        self.assertAlmostEqual(values[-1], 0.0, places=12)
        self.assertTrue(np.allclose(values[-3:-1], -0.5, atol=1e-12))
        self.assertTrue(np.allclose(values[:-3], -1.0, atol=1e-12))

    def test_number_conservation(self) -> None:
        f = self.rng.normal(size=16)
        number, _ = conservation_moments(self.op, f)
        self.assertLess(abs(number), 1e-14)

    def test_dirichlet_form_nonnegative(self) -> None:
        for _ in range(5):
            self.assertGreaterEqual(dirichlet_form(self.op, self.rng.normal(size=16)), -1e-14)

    def test_weighted_norms(self) -> None:
        norm_v, norm_inv = weighted_norms(self.op, np.ones(16))
        self.assertAlmostEqual(norm_v, 1.0, places=13)
        self.assertAlmostEqual(norm_inv, 1.0, places=13)

    def test_resolvent_solve_caches_factors(self) -> None:
        rhs = self.rng.normal(size=16)
        x = self.op.resolvent_solve(2.0, rhs)
        self.assertTrue(np.allclose(2.0 * x - apply_L(self.op, x), rhs, atol=1e-12))
        self.op.resolvent_solve(2.0, rhs)
        self.assertEqual(len(self.op._factorizations), 1)

    def test_rejects_vanishing_frequency(self) -> None:
        table = cosine_table()
        empty = KernelTable(
            grid=table.grid, K=np.zeros((16, 16)), V=table.V, v0=1.0, c1=1.0, c2=1.0,
            quad_tol=1e-10,
        )  # fmt: skip
        with self.assertRaises(InvalidTableError):
            DiscreteOperator(empty)


class ProjectionTest(unittest.TestCase):
    def setUp(self) -> None:
        self.op = DiscreteOperator(cosine_table())
        self.f = np.random.default_rng(11).normal(size=16)

    def test_invariants_are_fixed(self) -> None:
        _, projected_one = project_Pi(self.op, np.ones(16))
        _, projected_inv = project_Pi(self.op, self.op.omega_inv)
        self.assertTrue(np.allclose(projected_one, 1.0, atol=1e-12))
        self.assertTrue(np.allclose(projected_inv, self.op.omega_inv, rtol=1e-12))

    def test_idempotent_and_matrix_form(self) -> None:
        _, once = project_Pi(self.op, self.f)
        _, twice = project_Pi(self.op, once)
        self.assertTrue(np.allclose(once, twice, atol=1e-12))
        self.assertTrue(np.allclose(projection_matrix(self.op) @ self.f, once, atol=1e-12))

    def test_remainder_is_v_orthogonal(self) -> None:
        _, projected = project_Pi(self.op, self.f)
        rest = self.f - projected
        V = self.op.Vdiag
        self.assertLess(abs(self.op.bracket(V * rest)), 1e-13)
        self.assertLess(abs(self.op.bracket(V * self.op.omega_inv * rest)), 1e-12)


class DecompositionTest(unittest.TestCase):
    def setUp(self) -> None:
        self.op = DiscreteOperator(cosine_table())

    def test_k_independent_state(self) -> None:
        T, S, h = decompose_state(self.op, np.full(16, 2.5 + 1.0j), 0.1)
        self.assertAlmostEqual(T, 2.5 + 1.0j, places=12)
        self.assertAlmostEqual(abs(S), 0.0, places=10)
        self.assertLess(np.max(np.abs(h)), 1e-10)

    def test_singular_mode_state(self) -> None:
        eps = 0.05
        T, S, h = decompose_state(self.op, 3.0 * self.op.omega_inv, eps)
        self.assertAlmostEqual(abs(T), 0.0, places=10)
        self.assertAlmostEqual(S, 3.0 * eps**-0.6, places=9)
        self.assertLess(np.max(np.abs(h)), 1e-9)

    def test_reconstruction(self) -> None:
        eps = 0.2
        f = np.random.default_rng(5).normal(size=16)
        T, S, h = decompose_state(self.op, f, eps)
        rebuilt = T + eps**0.6 * S * self.op.omega_inv + eps**0.8 * h
        self.assertTrue(np.allclose(rebuilt, f, atol=1e-12))

    def test_rejects_nonpositive_eps(self) -> None:
        with self.assertRaises(ValueError):
            decompose_state(self.op, np.ones(16), 0.0)


@functools.lru_cache(maxsize=None)
def physical_operator(n: int) -> DiscreteOperator:
    return DiscreteOperator(assemble_kernel(WaveGrid(n), quad_tol=1e-9))


class OperatorIdentitiesTest(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(19)

    def test_self_adjoint_and_linear(self) -> None:
        tables = {"cosine": DiscreteOperator(cosine_table()), "physical": physical_operator(16)}
        for name, op in tables.items():
            f, g = self.rng.normal(size=(2, 16))
            with self.subTest(table=name):
                left = op.bracket(apply_L(op, f) * g)
                right = op.bracket(f * apply_L(op, g))
                self.assertLess(abs(left - right), 1e-12 * max(1.0, abs(left)))
                combined = apply_L(op, 2.0 * f - 0.5j * g)
                expected = 2.0 * apply_L(op, f) - 0.5j * apply_L(op, g)
                self.assertTrue(np.allclose(combined, expected, atol=1e-13))

    def test_coercivity_on_projection_complement(self) -> None:
        for op in (DiscreteOperator(cosine_table()), physical_operator(16)):
            report = spectral_report(op)
            self.assertGreater(report.coercivity, 0.0)
            for _ in range(20):
                f = self.rng.normal(size=16)
                _, projected = project_Pi(op, f)
                rest = f - projected
                norm_v = weighted_norms(op, rest)[0]
                bound = report.coercivity * norm_v**2
                self.assertGreaterEqual(dirichlet_form(op, rest), bound * (1.0 - 1e-10))

    def test_omega_inv_residual_shrinks(self) -> None:
        residuals = []
        for n in (16, 32):
            op = physical_operator(n)
            residuals.append(weighted_norms(op, apply_L(op, op.omega_inv))[0])
        self.assertGreater(residuals[0], 0.0)
        self.assertLess(residuals[1], residuals[0])


class SpectralReportTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.op = physical_operator(16)
        cls.report = spectral_report(cls.op)

    def test_two_invariant_directions(self) -> None:
        self.assertTrue(self.report.enriched)
        values = self.report.eigenvalues
        self.assertEqual(len(values), 17)
        scale = float(np.max(np.abs(values)))
        self.assertLess(abs(values[1]), 1e-6 * scale)
        self.assertGreater(abs(values[2]), 1e-6 * scale)
        self.assertEqual(self.report.zero_count, 2)
        self.assertAlmostEqual(self.report.c0, abs(values[2]))

    def test_non_invariant_enrichment_is_not_counted(self) -> None:
        report = spectral_report(self.op, power=0.5)
        self.assertTrue(report.enriched)
        self.assertEqual(report.zero_count, 1)
        scale = float(np.max(np.abs(report.eigenvalues)))
        self.assertGreater(abs(report.eigenvalues[1]), 1e-6 * scale)

    def test_foreign_table_uses_plain_spectrum(self) -> None:
        op = DiscreteOperator(cosine_table())
        self.assertFalse(matches_continuous_kernel(op))
        with self.assertLogs(level="WARNING"):
            report = spectral_report(op)
        self.assertFalse(report.enriched)
        self.assertEqual(report.zero_count, 1)
        self.assertTrue(np.allclose(np.abs(report.eigenvalues[1:3]), 0.5, atol=1e-12))
        self.assertAlmostEqual(report.c0, 0.5, places=12)

    def test_rejects_bad_power(self) -> None:
        for power in (0.0, 1.5):
            with self.subTest(power=power), self.assertRaises(ValueError):
                spectral_report(self.op, power=power)

    def test_row_sum_residual(self) -> None:
        self.assertLessEqual(self.report.residual_one, 1e-12 * float(np.max(self.op.Vdiag)))
        self.assertGreater(self.report.residual_omega_inv, 0.0)

    def test_report_sizes(self) -> None:
        self.assertEqual(self.report.n, 16)
        self.assertEqual(len(self.report.plain_eigenvalues), 16)



if __name__ == "__main__":
    unittest.main()
