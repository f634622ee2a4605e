import unittest
from unittest.mock import patch

import numpy as np

from rsv.benchmark import benchmark_chain
from rsv.data import PerturbationSpec, per_run_kernels
from rsv.metric import DistributionShapeError, family_distance
from rsv.model import InducedChain, StatePartition
from rsv.model.chain import absorbing_rows
from rsv.oracle import (
    HitKind,
    InstanceTooLargeError,
    StartStateError,
    averaged_true_chain,
    exhaustive_safety,
    kappa_sum_safety,
    mc_safety,
    simulate_trajectory,
    validate_bound,
)
from rsv.robust_dp import solve_robust_safety
from rsv.utils.ray_executor import RayExecutor
from tests.fakes import fake_ray
from tests.random_chains import random_chain


def three_state_chain() -> InducedChain:
    partition = StatePartition(states=("h", "u", "e"), goal={"e"}, unsafe={"u"})
    rows = absorbing_rows(partition, 2)
    rows[:, 0] = [0.5, 0.3, 0.2]
    return InducedChain(partition=partition, horizon=2, rows=rows)


class TestMonteCarlo(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.chain = benchmark_chain()

    def test_last_step_estimate(self):
        estimate = mc_safety(self.chain, (9, "1"), 1_000_000, seed=1)
        self.assertAlmostEqual(estimate.estimate, 0.5, delta=0.002)
        self.assertAlmostEqual(estimate.half_width, 0.00098, delta=1e-5)
        self.assertEqual(estimate.censored, 0)
        self.assertEqual(estimate.unsafe + estimate.goal, 1_000_000)

    def test_agrees_with_the_nominal_table(self):
        expected = solve_robust_safety(self.chain).value(0, "1")
        estimate = mc_safety(self.chain, (0, "1"), 1_000_000, seed=2)
        self.assertLess(
            abs(estimate.estimate - expected), 4 * estimate.half_width
        )
        self.assertEqual(estimate.censored, 0)

    def test_point_mass_into_the_unsafe_set(self):
        partition = StatePartition(states=("h", "u"), unsafe={"u"})
        rows = absorbing_rows(partition, 3)
        rows[:, 0] = [0.0, 1.0]
        chain = InducedChain(partition=partition, horizon=3, rows=rows)
        estimate = mc_safety(chain, (0, "h"), 1000, seed=0)
        self.assertEqual((estimate.estimate, estimate.half_width), (1.0, 0.0))

    def test_living_forever_is_censored(self):
        partition = StatePartition(states=("h", "u"), unsafe={"u"})
        chain = InducedChain(
            partition=partition, horizon=4, rows=absorbing_rows(partition, 4)
        )
        estimate = mc_safety(chain, (1, "h"), 500, seed=0)
        self.assertEqual((estimate.censored, estimate.estimate), (500, 0.0))

        outcome = simulate_trajectory(chain, (1, "h"), np.random.default_rng(0))
        self.assertEqual((outcome.hit, outcome.hitting_time), (HitKind.CENSORED, 3))

    def test_agrees_with_enumeration_on_tiny_chains(self):
        rng = np.random.default_rng(12)
        for k in range(10):
            chain = random_chain(rng, 4, 3)
            x = chain.partition.living[0]
            estimate = mc_safety(chain, (0, x), 20_000, seed=k)
            exact = exhaustive_safety(chain, (0, x))
            self.assertLessEqual(
                abs(estimate.estimate - exact), 4 * estimate.half_width + 5 / 20_000
            )

    def test_seeded_and_chunk_stable(self):
        first = mc_safety(self.chain, (5, "2"), 150_000, seed=3)
        second = mc_safety(self.chain, (5, "2"), 150_000, seed=3)
        self.assertEqual(first, second)

    def test_trajectory_outcome(self):
        outcome = simulate_trajectory(self.chain, (9, "1"), np.random.default_rng(4))
        self.assertIn(outcome.hit, (HitKind.UNSAFE_FIRST, HitKind.GOAL_FIRST))
        self.assertEqual(outcome.hitting_time, 1)

    def test_start_state_errors(self):
        with self.assertRaises(StartStateError):
            mc_safety(self.chain, (0, "11"), 10, seed=0)
        with self.assertRaises(StartStateError):
            mc_safety(self.chain, (10, "1"), 10, seed=0)
        with self.assertRaises(ValueError):
            mc_safety(self.chain, (0, "1"), 0, seed=0)


class TestExhaustive(unittest.TestCase):
    def test_hand_checked_two_step_chain(self):
        chain = three_state_chain()
        self.assertAlmostEqual(exhaustive_safety(chain, (0, "h")), 0.3 + 0.5 * 0.3)
        self.assertAlmostEqual(exhaustive_safety(chain, (1, "h")), 0.3)

    def test_definitional_values(self):
        chain = three_state_chain()
        self.assertEqual(exhaustive_safety(chain, (0, "u")), 1.0)
        self.assertEqual(exhaustive_safety(chain, (0, "e")), 0.0)

    def test_random_four_state_chains(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            chain = random_chain(rng, 4, 4)
            table = solve_robust_safety(chain)
            for x in chain.partition.living:
                self.assertAlmostEqual(
                    exhaustive_safety(chain, (0, x)), table.value(0, x), delta=1e-10
                )

    def test_truncated_reference_chain(self):
        full = benchmark_chain()
        chain = InducedChain(partition=full.partition, horizon=2, rows=full.rows[8:])
        self.assertAlmostEqual(exhaustive_safety(chain, (0, "1")), 0.3 + 0.4 * 0.5)
        self.assertAlmostEqual(
            exhaustive_safety(chain, (0, "1")),
            solve_robust_safety(chain).value(0, "1"),
            delta=1e-10,
        )

    def test_too_many_paths(self):
        with self.assertRaises(InstanceTooLargeError):
            exhaustive_safety(benchmark_chain(), (0, "1"))

    def test_kappa_sum_on_the_reference_chain(self):
        chain = benchmark_chain()
        self.assertAlmostEqual(
            kappa_sum_safety(chain, (0, "1")),
            solve_robust_safety(chain).value(0, "1"),
            delta=1e-12,
        )


class TestAveragedTrueChain(unittest.TestCase):
    def setUp(self):
        self.chain = benchmark_chain()
        self.partition = self.chain.partition

    def test_identical_kernels(self):
        averaged = averaged_true_chain(self.partition, [self.chain.rows] * 3)
        np.testing.assert_allclose(averaged.rows, self.chain.rows)

    def test_midpoint_of_two_kernels(self):
        other = three_state_chain()
        a = absorbing_rows(other.partition, 2)
        a[:, 0] = [0.0, 1.0, 0.0]
        b = absorbing_rows(other.partition, 2)
        b[:, 0] = [0.0, 0.0, 1.0]
        averaged = averaged_true_chain(other.partition, [a, b])
        np.testing.assert_allclose(averaged.rows[:, 0], [[0.0, 0.5, 0.5]] * 2)

    def test_mean_stays_within_half_delta_of_each_run(self):
        spec = PerturbationSpec(delta=0.2, seed=6)
        kernels = per_run_kernels(self.chain, spec, [1, 4, 5, 8, 9], 10)
        averaged = averaged_true_chain(self.partition, kernels)
        living = self.partition.living_mask
        for kernel in kernels:
            self.assertLessEqual(
                family_distance(averaged.rows, kernel, living), 0.2 + 1e-12
            )

    def test_shape_mismatch(self):
        with self.assertRaises(DistributionShapeError):
            averaged_true_chain(
                self.partition, [self.chain.rows, self.chain.rows[:5]]
            )
        with self.assertRaises(DistributionShapeError):
            averaged_true_chain(self.partition, [three_state_chain().rows])


class TestValidateBound(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.chain = benchmark_chain()

    def test_reference_configuration_has_no_violations(self):
        report = validate_bound(self.chain, 0.2, 0.05, 2_000, 3, seed=0)
        self.assertEqual(report.violations, 0)
        self.assertEqual(report.empirical_confidence, 1.0)
        self.assertTrue(report.meets_confidence)
        self.assertEqual(len(report.per_trial_max_gap), 3)
        self.assertTrue(all(gap < 0 for gap in report.per_trial_max_gap))
        self.assertEqual(np.array(report.cell_violations).shape, (10, 10))

    def test_tiny_sample_with_weak_confidence(self):
        report = validate_bound(self.chain, 0.2, 0.5, 10, 5, seed=1)
        self.assertEqual(report.violations, 0)

    def test_exact_sampling(self):
        report = validate_bound(self.chain, 0.0, 0.05, 1_000, 2, seed=2)
        self.assertEqual(report.violations, 0)

    def test_report_is_reproducible(self):
        first = validate_bound(self.chain, 0.2, 0.05, 500, 2, seed=9)
        second = validate_bound(self.chain, 0.2, 0.05, 500, 2, seed=9)
        self.assertEqual(first.model_dump(), second.model_dump())

    @patch("rsv.utils.ray_executor.ray", new_callable=fake_ray)
    def test_parallel_trials_match_a_single_thread(self, mock_ray):
        try:
            single = validate_bound(self.chain, 0.2, 0.05, 300, 3, seed=4)
            parallel = validate_bound(self.chain, 0.2, 0.05, 300, 3, seed=4, threads=2)
        finally:
            RayExecutor._initialized = False
            RayExecutor._num_cpus = None
        self.assertEqual(single.model_dump(), parallel.model_dump())
        self.assertEqual(mock_ray.get.call_count, 2)

    def test_trials_must_be_positive(self):
        with self.assertRaises(ValueError):
            validate_bound(self.chain, 0.2, 0.05, 100, 0, seed=0)


if __name__ == "__main__":
    unittest.main()
