import unittest

import numpy as np

from phonon_diffusion.kernel import KernelTable, WaveGrid
from phonon_diffusion.limit import (
    KineticSimulation,
    MomentRow,
    MomentTrace,
    Scheme,
    SimConfig,
    StiffnessError,
    compute_kappas,
    enforce_dissipation,
    mode_propagator,
    run_epsilon_sweep,
)
from phonon_diffusion.linear import DiscreteOperator, weighted_norms


def cosine_table(n: int = 16) -> KernelTable:
    grid = WaveGrid(n)
    nodes = grid.nodes
    K = 1.0 + np.cos(2.0 * np.pi * (nodes[:, None] - nodes[None, :]))
    V = np.abs(np.sin(np.pi * nodes)) ** (5.0 / 3.0)
    return KernelTable(grid=grid, K=K, V=V, v0=1.0, c1=1.0, c2=1.0, quad_tol=1e-10)


def small_config(**overrides) -> SimConfig:
    values = dict(
        eps=0.5, n=16, modes=8, box_length=16.0, t_end=1.0, steps=20, record_every=5
    )
    values.update(overrides)
    return SimConfig(**values)


def row(t: float) -> MomentRow:
    return MomentRow(t=t, j=0, xi=0.0, T=1j, S=0j, h_norm=0.0, l2_norm=1.0, r1=0.0, r2=0.0)


class SimConfigTest(unittest.TestCase):
    def test_time_step(self) -> None:
        self.assertAlmostEqual(small_config().dt, 0.05)

    def test_validation(self) -> None:
        with self.assertRaises(ValueError):
            small_config(eps=0.0)
        with self.assertRaises(ValueError):
            small_config(modes=7)
        with self.assertRaises(ValueError):
            small_config(record_every=0)
        with self.assertRaises(ValueError):
            small_config(T_bar=float("nan"))


class PropagatorTest(unittest.TestCase):
    def setUp(self) -> None:
        self.velocity = np.array([-2.0, -0.5, 0.5, 2.0])
        self.xi = 0.7

    def test_pure_transport_is_a_phase(self) -> None:
        config = small_config()
        propagator = mode_propagator(np.zeros((4, 4)), self.velocity, self.xi, config)
        theta = config.dt * config.eps ** (1.0 - config.alpha) * self.xi * self.velocity
        expected = (1.0 - 0.5j * theta) / (1.0 + 0.5j * theta)
        self.assertTrue(np.allclose(propagator, np.diag(expected), atol=1e-14))
        self.assertTrue(np.allclose(np.abs(np.diag(propagator)), 1.0))

    def test_implicit_euler(self) -> None:
        config = small_config(scheme=Scheme.IMPLICIT_EULER)
        propagator = mode_propagator(np.zeros((4, 4)), self.velocity, self.xi, config)
        theta = config.dt * config.eps ** (1.0 - config.alpha) * self.xi * self.velocity
        self.assertTrue(np.allclose(propagator, np.diag(1.0 / (1.0 + 1j * theta))))

    def test_dissipation_untouched_when_nonpositive(self) -> None:
        op = DiscreteOperator(cosine_table())
        matrix = op.matrix()
        self.assertIs(enforce_dissipation(op, matrix), matrix)

    def test_dissipation_clips_positive_part(self) -> None:
        op = DiscreteOperator(cosine_table())
        shifted = op.matrix() + 0.5 * np.eye(16)
        with self.assertLogs(level="WARNING"):
            clipped = enforce_dissipation(op, shifted)
        symmetric = clipped * op.weights[:, None]
        self.assertTrue(np.allclose(symmetric, symmetric.T, atol=1e-14))
        self.assertLess(np.max(np.linalg.eigvalsh(symmetric)), 1e-12)


class KineticSimulationTest(unittest.TestCase):
    def setUp(self) -> None:
        self.table = cosine_table()
        self.simulation = KineticSimulation(self.table, small_config())

    def test_initial_state(self) -> None:
        state = self.simulation.init()
        self.assertEqual(state.f_hat.shape, (8, 16))
        self.assertEqual(state.t, 0.0)
        self.assertTrue(np.all(state.f_hat[4] == 0.0))
        for moment in self.simulation.extract_moments(state):
            self.assertLess(abs(moment.S), 1e-10)
            self.assertLess(moment.h_norm, 1e-10)

    def test_array_initial_data(self) -> None:
        samples = np.ones((8, 1))
        state = self.simulation.init(samples)
        self.assertTrue(np.allclose(state.f_hat[0], 1.0))
        self.assertLess(np.max(np.abs(state.f_hat[1:])), 1e-14)

    def test_rejects_complex_initial_data(self) -> None:
        with self.assertRaises(ValueError):
            self.simulation.init(np.full((8, 16), 1.0 + 0.5j))
        with self.assertRaises(ValueError):
            self.simulation.init(lambda x, k: np.exp(1j * x) + 0.0 * k)

    def test_constant_state_is_stationary(self) -> None:
        start = self.simulation.init(np.full((8, 1), 2.5))
        final, _, _ = self.simulation.run(start)
        self.assertTrue(np.allclose(final.f_hat[0], start.f_hat[0], rtol=1e-12, atol=0.0))
        self.assertLess(np.max(np.abs(final.f_hat[1:])), 1e-13)

    def test_kinetic_part_stays_bounded(self) -> None:
        config = small_config(t_end=4.0, steps=80, record_every=4)
        simulation = KineticSimulation(self.table, config)
        start = simulation.init()
        bounds = [
            weighted_norms(simulation.op, start.f_hat[j])[0] / config.eps**0.8
            for j in range(simulation.half)
        ]
        _, trace, _ = simulation.run(start)
        self.assertEqual(len(trace.times), 21)
        for row in trace.rows:
            self.assertLessEqual(row.h_norm, bounds[row.j] * (1.0 + 1e-9) + 1e-14)

    def test_transport_only_phase(self) -> None:
        errors = []
        for steps in (40, 80):
            config = small_config(steps=steps, record_every=steps)
            simulation = KineticSimulation(self.table, config)
            half = simulation.half
            simulation.propagators = np.array(
                [
                    mode_propagator(np.zeros((16, 16)), simulation.group_velocity, xi, config)
                    for xi in simulation.xi[:half]
                ]
            )
            start = state = simulation.init()
            for _ in range(steps):
                state = simulation.step(state)
            rate = config.eps ** (1.0 - config.alpha) * np.outer(
                simulation.xi[:half], simulation.group_velocity
            )
            exact = start.f_hat[:half] * np.exp(-1j * rate * config.t_end)
            moduli = np.abs(state.f_hat[:half]) - np.abs(start.f_hat[:half])
            self.assertLess(np.max(np.abs(moduli)), 1e-12)
            errors.append(float(np.max(np.abs(state.f_hat[:half] - exact))))
        self.assertGreater(errors[0], 0.0)
        self.assertLess(errors[1], 0.3 * errors[0])

    def test_conjugate_symmetry(self) -> None:
        state = self.simulation.step(self.simulation.init())
        f_hat = state.f_hat
        for j in range(1, 4):
            self.assertTrue(np.array_equal(f_hat[8 - j], np.conj(f_hat[j])))
        self.assertEqual(state.step_index, 1)
        self.assertAlmostEqual(state.t, 0.05)

    def test_run(self) -> None:
        final, trace, diagnostics = self.simulation.run(self.simulation.init())
        self.assertEqual(final.step_index, 20)
        self.assertEqual(len(trace.times), 5)
        self.assertEqual(len(trace.rows), 5 * 4)
        self.assertEqual(sorted(trace.by_mode()), [0, 1, 2, 3])
        self.assertLessEqual(diagnostics.max_norm_ratio, 1.0 + 1e-12)
        self.assertLess(diagnostics.mean_drift, 1e-12)

    def test_stiffness_guard(self) -> None:
        with self.assertRaises(StiffnessError):
            KineticSimulation(self.table, small_config(eps=0.01, steps=10, record_every=1))

    def test_grid_mismatch(self) -> None:
        with self.assertRaises(ValueError):
            KineticSimulation(self.table, small_config(n=32))


class TraceTest(unittest.TestCase):
    def test_times_must_increase(self) -> None:
        trace = MomentTrace(eps=0.1)
        trace.extend([row(0.0)])
        trace.extend([row(0.5)])
        with self.assertRaises(ValueError):
            trace.extend([row(0.5)])
        self.assertEqual(trace.times, [0.0, 0.5])


class SweepTest(unittest.TestCase):
    def test_sweep(self) -> None:
        kappas = compute_kappas(1.0)
        report = run_epsilon_sweep(cosine_table(), small_config(), [0.5, 0.4], kappas)
        self.assertEqual(report.eps, [0.5, 0.4])
        self.assertIn(report.sign, (-1, 1))
        self.assertEqual(len(report.limit_errors), 2)
        self.assertTrue(all(error >= 0.0 for error in report.slaving_errors))

    def test_remainders_decrease_with_eps(self) -> None:
        template = small_config(box_length=256.0, t_end=5.0, steps=50, record_every=5)
        report = run_epsilon_sweep(cosine_table(), template, [0.5, 0.1], compute_kappas(1.0))
        coarse, fine = report.results
        self.assertGreater(coarse.mean_r1, 0.0)
        self.assertLess(fine.mean_r1, coarse.mean_r1)
        self.assertLess(fine.mean_r2, coarse.mean_r2)

    def test_rejects_unsorted_eps(self) -> None:
        with self.assertRaises(ValueError):
            run_epsilon_sweep(cosine_table(), small_config(), [0.4, 0.5], compute_kappas(1.0))


if __name__ == "__main__":
    unittest.main()
