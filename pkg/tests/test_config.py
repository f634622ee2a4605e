import copy
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from rsv.benchmark import benchmark_document, benchmark_model
from rsv.config import (
    ModelFileError,
    OutputFormat,
    RunConfig,
    RunConfigError,
    load_model,
    parse_model,
)
from rsv.model import ModelValidationError, induce_chain
from tests.random_chains import STUBS


class TestLoadModel(unittest.TestCase):
    def setUp(self):
        self.document = benchmark_document()

    def test_stub_matches_the_embedded_reference_problem(self):
        model, policy = load_model(STUBS / "benchmark" / "model.json")
        expected_model, expected_policy = benchmark_model()
        self.assertEqual(model.partition, expected_model.partition)
        np.testing.assert_array_equal(model.kernel, expected_model.kernel)
        np.testing.assert_array_equal(policy.rules, expected_policy.rules)

    def test_per_t_kernel_and_policy(self):
        model, policy = load_model(STUBS / "tiny" / "model.json")
        chain = induce_chain(model, policy)
        np.testing.assert_allclose(chain.row(0, "h1"), [0.5, 0.2, 0.1, 0.2])
        np.testing.assert_allclose(chain.row(0, "h2"), [0.0, 0.5, 0.3, 0.2])
        np.testing.assert_allclose(chain.row(1, "h1"), [0.0, 0.0, 0.375, 0.625])
        np.testing.assert_allclose(chain.row(1, "h2"), [0.0, 0.0, 0.25, 0.75])

    def test_policy_override_replaces_one_step(self):
        _, policy = parse_model(self.document)
        np.testing.assert_allclose(policy.rules[8, 0], [0.4, 0.3, 0.3])
        np.testing.assert_allclose(policy.rules[9, 0], [0.0, 0.5, 0.5])

    def test_rows_within_tolerance_are_renormalised(self):
        document = copy.deepcopy(self.document)
        row = document["kernel"]["stationary"]["*"]["a_U"]
        row["11"] += 4e-10
        model, _ = parse_model(document)
        self.assertAlmostEqual(model.kernel[0, 0, 1].sum(), 1.0, delta=1e-15)
        self.assertLess(model.kernel[0, 0, 1, 10], 0.5 + 4e-10)

    def test_larger_deviation_is_a_violation(self):
        document = copy.deepcopy(self.document)
        document["kernel"]["stationary"]["*"]["a_U"]["11"] = 0.4
        with self.assertRaises(ModelValidationError) as context:
            parse_model(document)
        self.assertEqual(len(context.exception.violations), 100)

    def test_missing_action_row(self):
        document = copy.deepcopy(self.document)
        del document["kernel"]["stationary"]["*"]["a_E"]
        with self.assertRaises(ModelValidationError) as context:
            parse_model(document)
        self.assertIn("missing row", str(context.exception))

    def test_explicit_state_beats_the_wildcard(self):
        document = copy.deepcopy(self.document)
        document["policy"]["default"]["3"] = {"a_E": 1.0}
        _, policy = parse_model(document)
        np.testing.assert_allclose(policy.rules[0, 2], [0.0, 0.0, 1.0])
        np.testing.assert_allclose(policy.rules[0, 3], [0.4, 0.3, 0.3])

    def test_rows_for_absorbing_states_are_rejected(self):
        document = copy.deepcopy(self.document)
        document["kernel"]["stationary"]["11"] = {"a_U": {"11": 1.0}}
        with self.assertRaises(ModelFileError):
            parse_model(document)

    def test_unknown_identifiers(self):
        cases = [
            ("kernel", lambda d: d["kernel"]["stationary"]["*"].update(a_X={"1": 1})),
            ("state", lambda d: d["policy"]["default"].update({"42": {"a_H": 1}})),
            ("successor", lambda d: d["kernel"]["stationary"]["*"]["a_H"].update(z=0)),
        ]
        for name, mutate in cases:
            with self.subTest(name):
                document = copy.deepcopy(self.document)
                mutate(document)
                with self.assertRaises(ModelFileError):
                    parse_model(document)

    def test_per_t_length_must_match_the_horizon(self):
        document = copy.deepcopy(self.document)
        document["kernel"] = {"per_t": [document["kernel"]["stationary"]] * 9}
        with self.assertRaises(ModelFileError):
            parse_model(document)

    def test_override_key_must_be_a_time(self):
        document = copy.deepcopy(self.document)
        document["policy"]["overrides"]["last"] = {}
        with self.assertRaises(ModelFileError):
            parse_model(document)

    def test_broken_partition(self):
        document = copy.deepcopy(self.document)
        document["goal"] = document["goal"] + ["11"]
        with self.assertRaises(ModelValidationError):
            parse_model(document)

    def test_unknown_keys_are_rejected(self):
        with self.assertRaises(ModelFileError) as context:
            load_model(STUBS / "unknown_key" / "model.json")
        self.assertIn("discount", str(context.exception))

    def test_malformed_json(self):
        with self.assertRaises(ModelFileError):
            load_model(STUBS / "malformed" / "model.json")

    def test_missing_file(self):
        with self.assertRaises(ModelFileError):
            load_model(STUBS / "nowhere" / "model.json")


class TestRunConfig(unittest.TestCase):
    def test_load_from_yaml(self):
        config = RunConfig.load(STUBS / "run" / "run.yaml")
        self.assertEqual((config.delta, config.p, config.seed), (0.2, 0.9, 7))
        self.assertTrue(config.exact_model)
        self.assertIs(config.format, OutputFormat.JSON)

    def test_flags_override_the_file(self):
        config = RunConfig.resolve(
            STUBS / "run" / "run.yaml", p=0.8, seed=None, format="table"
        )
        self.assertEqual((config.p, config.seed), (0.8, 7))
        self.assertIs(config.format, OutputFormat.TABLE)

    def test_defaults(self):
        config = RunConfig.resolve(None)
        self.assertEqual(
            (config.delta, config.beta, config.n_runs), (0.2, 0.05, 100_000)
        )
        self.assertIsNone(config.p)

    def test_ranges(self):
        for settings in ({"delta": 1.5}, {"beta": 0.0}, {"p": 1.0}, {"n_runs": 0}):
            with self.subTest(settings):
                with self.assertRaises(RunConfigError):
                    RunConfig.build(settings)

    def test_unknown_setting(self):
        with self.assertRaises(RunConfigError):
            RunConfig.build({"radius": 0.3})

    def test_threads_fall_back_to_the_environment(self):
        with patch.dict(os.environ, {"RSV_THREADS": "3"}):
            self.assertEqual(RunConfig.resolve(None).threads, 3)
            self.assertEqual(RunConfig.resolve(None, threads=2).threads, 2)

    def test_yaml_errors(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "run.yaml"
            path.write_text("delta: [0.2\n")
            with self.assertRaises(RunConfigError):
                RunConfig.load(path)
            path.write_text("- 0.2\n")
            with self.assertRaises(RunConfigError):
                RunConfig.load(path)


if __name__ == "__main__":
    unittest.main()
