import unittest

import numpy as np

from rsv.benchmark import benchmark_chain
from rsv.metric import RadiusDomainError, hamming_matrix, tv_distance
from rsv.robust_dp import (
    NonStochasticRowError,
    dual_objective,
    kappa,
    payoff_vector,
    robust_backup,
    stage_cost,
    worst_case_expectation_greedy,
)
from rsv.robust_dp.solver import boundary_values
from tests.random_chains import random_partition, random_row, random_values


class TestReferenceBackups(unittest.TestCase):
    def setUp(self):
        self.chain = benchmark_chain()
        self.partition = self.chain.partition
        self.terminal = boundary_values(self.partition, 10)[10]

    def test_last_step(self):
        result = robust_backup(
            self.chain.row(9, "1"), self.terminal, "1", 0.2, self.partition
        )
        self.assertAlmostEqual(result.value, 0.5 + 0.2, delta=1e-9)

    def test_second_to_last_step(self):
        next_values = self.terminal.copy()
        next_values[self.partition.living_mask] = 0.7
        result = robust_backup(
            self.chain.row(8, "1"), next_values, "1", 0.2, self.partition
        )
        self.assertAlmostEqual(result.value, 0.4 * 0.7 + 0.3 + 0.2, delta=1e-9)

    def test_worst_distribution_moves_radius_to_the_unsafe_set(self):
        result = robust_backup(
            self.chain.row(9, "1"), self.terminal, "1", 0.2, self.partition
        )
        worst = result.worst_distribution.masses
        self.assertAlmostEqual(worst[self.partition.unsafe_mask].sum(), 0.7)
        self.assertAlmostEqual(tv_distance(worst, self.chain.row(9, "1")), 0.2)

    def test_full_radius_reaches_the_largest_payoff(self):
        result = robust_backup(
            self.chain.row(3, "2"), self.terminal, "2", 1.5, self.partition
        )
        self.assertAlmostEqual(result.value, 1.0, delta=1e-12)

    def test_stage_cost_and_kappa(self):
        self.assertEqual(stage_cost("1", "11", self.partition), 1)
        self.assertEqual(stage_cost("1", "13", self.partition), 0)
        self.assertEqual(stage_cost("1", "2", self.partition), 0)
        self.assertAlmostEqual(kappa(self.chain.row(0, "1"), self.partition), 0.3)

    def test_payoffs_ignore_continuation_outside_the_living_set(self):
        values = np.full(self.partition.size, 0.5)
        payoffs = payoff_vector(values, self.partition)
        np.testing.assert_allclose(payoffs[self.partition.unsafe_mask], 1.0)
        np.testing.assert_allclose(payoffs[self.partition.goal_mask], 0.0)
        np.testing.assert_allclose(payoffs[self.partition.living_mask], 0.5)


class TestDuality(unittest.TestCase):
    def test_exact_dual_matches_greedy_transport(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            size = int(rng.integers(1, 9))
            partition = random_partition(rng, size)
            x = partition.living[0]
            row = random_row(rng, size)
            values = random_values(rng, partition)
            radius = float(rng.choice([0.0, 1.0, rng.random()]))

            result = robust_backup(row, values, x, radius, partition)
            expected, _ = worst_case_expectation_greedy(
                row, payoff_vector(values, partition), radius
            )
            self.assertAlmostEqual(result.value, expected, delta=1e-9)

            for lam in rng.exponential(1.0, 100):
                bound = dual_objective(lam, row, values, x, radius, partition)
                self.assertGreaterEqual(bound, result.value - 1e-12)

    def test_zero_radius_is_the_nominal_expectation(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            partition = random_partition(rng, 6)
            row = random_row(rng, 6)
            values = random_values(rng, partition)
            result = robust_backup(row, values, partition.living[0], 0.0, partition)
            self.assertAlmostEqual(
                result.value, float(row @ payoff_vector(values, partition)), delta=1e-12
            )

    def test_value_grows_with_the_radius(self):
        rng = np.random.default_rng(17)
        partition = random_partition(rng, 7)
        row, values = random_row(rng, 7), random_values(rng, partition)
        results = [
            robust_backup(row, values, partition.living[0], r, partition).value
            for r in np.linspace(0.0, 1.0, 21)
        ]
        self.assertTrue(all(b >= a - 1e-12 for a, b in zip(results, results[1:])))


class TestGroundMetricHook(unittest.TestCase):
    def test_explicit_hamming_matrix_agrees_with_the_closed_form(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            size = int(rng.integers(2, 7))
            partition = random_partition(rng, size)
            row, values = random_row(rng, size), random_values(rng, partition)
            radius = float(rng.random())
            x = partition.living[0]
            closed = robust_backup(row, values, x, radius, partition)
            general = robust_backup(
                row, values, x, radius, partition, hamming_matrix(size)
            )
            self.assertAlmostEqual(general.value, closed.value, delta=1e-9)
            self.assertIsNone(general.worst_distribution)

    def test_scaled_metric_halves_the_effective_radius(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            partition = random_partition(rng, 5)
            row, values = random_row(rng, 5), random_values(rng, partition)
            radius = float(rng.random())
            x = partition.living[0]
            doubled = robust_backup(
                row, values, x, radius, partition, 2.0 * hamming_matrix(5)
            )
            halved = robust_backup(row, values, x, radius / 2, partition)
            self.assertAlmostEqual(doubled.value, halved.value, delta=1e-9)


class TestBackupErrors(unittest.TestCase):
    def setUp(self):
        self.chain = benchmark_chain()
        self.partition = self.chain.partition
        self.row = self.chain.row(0, "1")
        self.values = boundary_values(self.partition, 10)[10]

    def test_negative_radius(self):
        with self.assertRaises(RadiusDomainError):
            robust_backup(self.row, self.values, "1", -0.1, self.partition)

    def test_non_stochastic_row(self):
        row = self.row * 0.9
        with self.assertRaises(NonStochasticRowError):
            robust_backup(row, self.values, "1", 0.1, self.partition)

    def test_negative_multiplier(self):
        with self.assertRaises(ValueError):
            dual_objective(-1.0, self.row, self.values, "1", 0.1, self.partition)

    def test_unknown_state(self):
        with self.assertRaises(KeyError):
            robust_backup(self.row, self.values, "99", 0.1, self.partition)

    def test_greedy_radius_domain(self):
        with self.assertRaises(RadiusDomainError):
            worst_case_expectation_greedy([1.0], [0.0], 1.5)


if __name__ == "__main__":
    unittest.main()
