"""Test the toy-model photon statistics and parameter sweeps."""
import unittest
from test.data.fixtures import single_mode
from unittest import mock

import numpy as np

from hybridgbs.kernel import calculation
from hybridgbs.kernel.calculation import calculate_toy_sweep, sweep_values, toy_photon_stats
from hybridgbs.kernel.errors import ParameterDomainError, RunError, UnphysicalCovarianceError
from hybridgbs.kernel.gaussian import bose_einstein
from hybridgbs.kernel.hafnian import pattern_probability
from hybridgbs.kernel.model import ToyParams

TOY = ToyParams(hbar_omega=2, epsilon=1, gamma=0.5, N0=1, Q0=7)


def log_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


class TestToyStatistics(unittest.TestCase):
    def test_decoupled(self):
        for T in [0.0, 0.3, 1.0]:
            s = toy_photon_stats(ToyParams(gamma=0), T)
            self.assertAlmostEqual(abs(s.alpha), 0.0, places=14)
            self.assertAlmostEqual(s.eta, float(bose_einstein(2.0, T)), places=14)

    def test_small_coupling_growth(self):
        gammas = [0.01, 0.02, 0.04]
        points = calculate_toy_sweep(TOY, 0.0, "gamma", gammas)
        eta = [p.stats.eta for p in points]
        alpha = [p.stats.alpha_abs for p in points]
        alpha_max = [p.stats.alpha_max for p in points]
        # the anomalous correlator grows quadratically while its bound grows only linearly
        self.assertAlmostEqual(log_slope(gammas, eta), 2.0, delta=0.1)
        self.assertAlmostEqual(log_slope(gammas, alpha), 2.0, delta=0.1)
        self.assertAlmostEqual(log_slope(gammas, alpha_max), 1.0, delta=0.1)

    def test_strong_coupling(self):
        s = toy_photon_stats(ToyParams(gamma=10.0), 0.0)
        self.assertAlmostEqual(s.eta, 0.1715, places=3)
        self.assertAlmostEqual(s.alpha_abs, 0.3745, places=3)
        self.assertAlmostEqual(s.alpha_c, 0.3394, places=3)
        self.assertAlmostEqual(s.alpha_max, 0.4482, places=3)
        # squeezing dominates: |α| between α_c and α_max
        self.assertGreater(s.alpha_abs, s.alpha_c)

    def test_bound_never_reached(self):
        gammas = sweep_values(0.01, 30.0, 40, log_scale=True)
        for T in [0.0, 0.1, 1.0]:
            for p in calculate_toy_sweep(TOY, T, "gamma", gammas):
                self.assertTrue(p.ok)
                self.assertLess(p.stats.alpha_abs, p.stats.alpha_max)

    def test_temperature_suppresses_squeezing(self):
        temperatures = sweep_values(0.01, 2.0, 30, log_scale=True)
        points = calculate_toy_sweep(TOY, 0.0, "T", temperatures)
        eta = np.array([p.stats.eta for p in points])
        self.assertTrue(np.all(np.diff(eta) >= 0))
        high = points[-1].stats
        self.assertLess(high.alpha_abs, high.alpha_c)

    def test_odd_even_ratio(self):
        # with |α| = α_c the probability ratio p1/p2 is (1 + 1.5η)/(0.5 + 1.5η)
        eta = 2.0
        alpha_c = np.sqrt(eta**2 + eta / 2)
        G = single_mode(eta, alpha_c)
        p1, p2 = pattern_probability(G, [1]), pattern_probability(G, [2])
        self.assertAlmostEqual(p1, 0.125)
        self.assertAlmostEqual(p2, 0.109375)
        self.assertAlmostEqual(p1 / p2, (1 + 1.5 * eta) / (0.5 + 1.5 * eta))


class TestSweep(unittest.TestCase):
    def test_values(self):
        np.testing.assert_allclose(sweep_values(0.01, 1.0, 3, log_scale=True), [0.01, 0.1, 1.0])
        np.testing.assert_allclose(sweep_values(0.0, 1.0, 3, log_scale=False), [0.0, 0.5, 1.0])
        with self.assertRaises(ParameterDomainError):
            sweep_values(0.0, 1.0, 3, log_scale=True)
        with self.assertRaises(ParameterDomainError):
            sweep_values(1.0, 1.0, 3, log_scale=False)
        with self.assertRaises(ParameterDomainError):
            sweep_values(0.1, 1.0, 1, log_scale=False)

    def test_order_and_workers(self):
        values = sweep_values(0.05, 5.0, 12, log_scale=True)
        serial = calculate_toy_sweep(TOY, 0.2, "gamma", values)
        parallel = calculate_toy_sweep(TOY, 0.2, "gamma", values, workers=4)
        self.assertEqual([p.value for p in parallel], list(values))
        self.assertEqual(serial, parallel)

    def test_failed_points(self):
        points = calculate_toy_sweep(TOY, 0.0, "gamma", [-2.0, 0.5])
        self.assertFalse(points[0].ok)
        self.assertIsNotNone(points[0].error)
        self.assertTrue(points[1].ok)

    def test_unphysical_point(self):
        stats = toy_photon_stats

        def checked(params, T):
            if params.gamma > 1.0:
                raise UnphysicalCovarianceError("|alpha| exceeds the bound")
            return stats(params, T)

        with mock.patch.object(calculation, "toy_photon_stats", side_effect=checked):
            points = calculate_toy_sweep(TOY, 0.1, "gamma", [0.5, 2.0])
        self.assertTrue(points[0].ok)
        self.assertFalse(points[1].ok)
        self.assertIn("bound", points[1].error)

    def test_all_failed(self):
        with self.assertRaises(RunError):
            calculate_toy_sweep(TOY, 0.0, "gamma", [-2.0, -3.0])

    def test_unknown_variable(self):
        with self.assertRaises(ParameterDomainError):
            calculate_toy_sweep(TOY, 0.0, "Q0", [1.0, 2.0])
