import csv
import json
from test.base_test import TestWithTempDir
from test.data.fixtures import covariance_json, single_mode, write_json

import numpy as np

from hybridgbs.cli import EXIT_CONFIGURATION, EXIT_FAILURE, EXIT_OK, build_argparser, load_config, main
from hybridgbs.data.readers import read_probability_table
from hybridgbs.data.writers import SWEEP_COLUMNS


class TestCli(TestWithTempDir):
    def run_cli(self, *argv: str) -> int:
        return main(list(argv))

    def read(self, name: str) -> str:
        with open(self.path(name)) as f:
            return f.read()

    def test_toy_sweep(self):
        code = self.run_cli("toy-sweep", "--temperature", "0.1", "--output", self.path("sweep.csv"))
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.reader(self.read("sweep.csv").splitlines()))
        self.assertEqual(rows[0], SWEEP_COLUMNS)
        self.assertEqual(len(rows), 61)
        self.assertAlmostEqual(float(rows[1][0]), 0.01)
        self.assertAlmostEqual(float(rows[-1][0]), 30.0)

    def test_hafnian(self):
        matrix = write_json(self.path("k4.json"), {"n": 4, "entries": (np.ones((4, 4)) - np.eye(4)).tolist()})
        config = write_json(self.path("run.json"), {"mode": "hafnian", "hafnian_path": matrix})
        code = self.run_cli("hafnian", "--config", config, "--output", self.path("haf.txt"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.read("haf.txt"), "3 0\n")

    def test_sample_deterministic(self):
        args = ["sample", "--gamma", "1.0", "--temperature", "0.25", "--seed", "42", "--count", "100"]
        self.assertEqual(self.run_cli(*args, "--output", self.path("a.csv")), EXIT_OK)
        self.assertEqual(self.run_cli(*args, "--output", self.path("b.csv")), EXIT_OK)
        self.assertEqual(self.read("a.csv"), self.read("b.csv"))
        self.assertEqual(len(self.read("a.csv").splitlines()), 100)

    def test_probs_then_validate(self):
        probs = self.path("probs.csv")
        config = write_json(self.path("run.json"), {"toy": {"gamma": 1.0}, "T_eff": 0.25, "cutoff": 8, "modes": "all"})
        self.assertEqual(self.run_cli("probs", "--config", config, "--output", probs), EXIT_OK)
        table = read_probability_table(probs)
        self.assertEqual(table.modes, 2)
        self.assertEqual(table.cutoff, 8)

        validate = write_json(
            self.path("validate.json"),
            {"toy": {"gamma": 1.0}, "T_eff": 0.25, "cutoff": 8, "probabilities_path": probs},
        )
        code = self.run_cli("validate", "--config", validate, "--output", self.path("report.json"))
        report = json.loads(self.read("report.json"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(report["passed"])
        agreement = [c for c in report["checks"] if c["name"] == "probability_file_agreement"][0]
        self.assertEqual(agreement["residual"], 0.0)

    def test_validate_corrupted(self):
        cov = write_json(self.path("cov.json"), covariance_json(single_mode(1.0, 1.6)))
        config = write_json(self.path("run.json"), {"covariance_path": cov, "cutoff": 6})
        code = self.run_cli("validate", "--config", config, "--output", self.path("report.json"))
        self.assertEqual(code, EXIT_FAILURE)
        self.assertFalse(json.loads(self.read("report.json"))["passed"])

    def test_configuration_errors(self):
        self.assertEqual(self.run_cli("probs", "--config", self.path("missing.json")), EXIT_CONFIGURATION)
        bad = write_json(self.path("bad.json"), {"toy": {"gamma": 1.0}, "colour": "blue"})
        self.assertEqual(self.run_cli("probs", "--config", bad), EXIT_CONFIGURATION)
        self.assertEqual(self.run_cli("hafnian"), EXIT_CONFIGURATION)
        missing_matrix = write_json(self.path("haf.json"), {"hafnian_path": self.path("nothing.json")})
        self.assertEqual(self.run_cli("hafnian", "--config", missing_matrix), EXIT_CONFIGURATION)
        self.assertEqual(self.run_cli("probs", "--cutoff", "-1"), EXIT_CONFIGURATION)

    def test_unstable(self):
        code = self.run_cli("probs", "--gamma", "-2", "--output", self.path("probs.csv"))
        self.assertEqual(code, EXIT_FAILURE)

    def test_flags_override_config(self):
        config = write_json(self.path("run.json"), {"mode": "toy-sweep", "toy": {"gamma": 1.0, "Q0": 4.0}, "seed": 1})
        args = build_argparser().parse_args(["sample", "--config", config, "--gamma", "0.3", "--seed", "7"])
        cfg = load_config(args)
        self.assertEqual(cfg.mode, "sample")
        self.assertEqual(cfg.toy.gamma, 0.3)
        self.assertEqual(cfg.toy.Q0, 4.0)
        self.assertEqual(cfg.seed, 7)
