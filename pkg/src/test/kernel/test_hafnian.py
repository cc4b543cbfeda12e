"""Test hafnian engines and hafnian-based pattern probabilities."""
import math
import time
import unittest
from test.data.fixtures import (
    random_symmetric,
    rng,
    squeezed_vacuum,
    squeezed_vacuum_probability,
    thermal,
    thermal_probability,
)

import numpy as np
import scipy.linalg

from hybridgbs.kernel.errors import HafnianSizeError, ParameterDomainError
from hybridgbs.kernel.gaussian import CovarianceMatrix, correlation_kernel
from hybridgbs.kernel.hafnian import (
    build_C,
    engine_costs,
    expand_pattern,
    hafnian_matching,
    hafnian_repeated,
    hafnian_trace,
    pattern_probability,
)
from hybridgbs.kernel.model import ModeLayout
from hybridgbs.kernel.sampler import MAX_TOTAL_CUTOFF, enumerate_distribution

ENGINES = ["repeated", "trace", "matching"]


def all_ones(n: int) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


class TestHafnianEngines(unittest.TestCase):
    def test_small_cases(self):
        b = 0.3 - 1.2j
        for haf in (hafnian_matching, hafnian_trace):
            self.assertEqual(haf(np.zeros((0, 0))), 1)
            self.assertAlmostEqual(haf(np.array([[5.0, b], [b, 7.0]])), b)
            self.assertAlmostEqual(haf(all_ones(4)), 3)
            self.assertEqual(haf(np.ones((3, 3))), 0)

    def test_complete_graph(self):
        # K_{2m} has (2m-1)!! perfect matchings
        for n, matchings in [(6, 15), (8, 105), (10, 945)]:
            self.assertAlmostEqual(hafnian_matching(all_ones(n)).real, matchings)
            self.assertLessEqual(abs(hafnian_trace(all_ones(n)) - matchings), 1e-9 * matchings)

    def test_block_diagonal(self):
        gen = rng(31)
        M1, M2 = random_symmetric(gen, 4), random_symmetric(gen, 6)
        expected = hafnian_matching(M1) * hafnian_matching(M2)
        for haf in (hafnian_matching, hafnian_trace):
            self.assertAlmostEqual(abs(haf(scipy.linalg.block_diag(M1, M2)) - expected), 0.0, places=10)

    def test_random_12(self):
        A = random_symmetric(rng(12), 12)
        reference = hafnian_matching(A)
        self.assertLessEqual(abs(hafnian_trace(A) - reference), 1e-10 * abs(reference))

    def test_engine_equivalence(self):
        gen = rng(200)
        for _ in range(200):
            n = 2 * int(gen.integers(1, 9))
            A = random_symmetric(gen, n)
            reference = hafnian_matching(A)
            self.assertLessEqual(abs(hafnian_trace(A) - reference), 1e-9 * max(abs(reference), 1e-12))

    def test_order_28_time(self):
        start = time.perf_counter()
        value = hafnian_trace(all_ones(28))
        self.assertLess(time.perf_counter() - start, 30.0)
        matchings = math.prod(range(1, 28, 2))
        self.assertLessEqual(abs(value - matchings), 1e-9 * matchings)

    def test_workers(self):
        A = random_symmetric(rng(8), 16)
        self.assertAlmostEqual(abs(hafnian_trace(A, workers=4) - hafnian_trace(A)), 0.0, places=9)

    def test_repeated(self):
        gen = rng(13)
        for s in [[1, 1, 1, 1], [2, 0, 1, 3], [4, 2], [0, 0, 6]]:
            A = random_symmetric(gen, len(s))
            idx = np.repeat(np.arange(len(s)), s)
            expanded = A[np.ix_(idx, idx)]
            # copies of the same index pair through the diagonal entry
            reference = hafnian_matching(expanded)
            self.assertLessEqual(abs(hafnian_repeated(A, s) - reference), 1e-9 * max(1.0, abs(reference)))
        self.assertEqual(hafnian_repeated(np.eye(2), [0, 0]), 1)
        self.assertEqual(hafnian_repeated(np.eye(2), [1, 0]), 0)

    def test_repeated_large_counts(self):
        # the alternating sum cancels here; haf of [[0, c], [c, 0]] repeated n times each is n! c^n
        c = 0.9 - 0.2j
        for n in (30, 50, 64):
            expected = math.factorial(n) * c**n
            value = hafnian_repeated(np.array([[0, c], [c, 0]]), [n, n])
            self.assertLessEqual(abs(value - expected), 1e-10 * abs(expected))

    def test_limits(self):
        with self.assertRaises(HafnianSizeError):
            hafnian_matching(all_ones(22))
        with self.assertRaises(HafnianSizeError):
            hafnian_trace(all_ones(38))
        with self.assertRaises(ParameterDomainError):
            hafnian_trace(np.array([[0.0, 1.0], [2.0, 0.0]]))
        with self.assertRaises(ParameterDomainError):
            hafnian_repeated(np.eye(2), [1])

    def test_costs(self):
        repeated, trace = engine_costs([1, 1, 1, 1, 1, 1])
        self.assertGreater(repeated, trace)
        repeated, trace = engine_costs([12])
        self.assertLess(repeated, trace)


class TestPatternExpansion(unittest.TestCase):
    def test_build_C(self):
        np.testing.assert_array_equal(build_C(thermal(0.0, 2)), 0)
        eta = 0.7
        k = eta / (1 + eta)
        np.testing.assert_allclose(build_C(thermal(eta)), [[0, k], [k, 0]], atol=1e-15)

    def test_build_C_squeezed(self):
        C = build_C(squeezed_vacuum(0.5, phase=0.3))
        self.assertGreater(abs(C[0, 0]), 0.1)
        np.testing.assert_allclose(C, C.T, atol=1e-15)

    def test_expand(self):
        C = np.arange(16, dtype=complex).reshape(4, 4)
        C = C + C.T
        np.testing.assert_array_equal(expand_pattern(C, [1, 1]), C)
        self.assertEqual(expand_pattern(C, [0, 0]).shape, (0, 0))
        C2 = np.array([[1, 2], [2, 3]], dtype=complex)
        np.testing.assert_array_equal(
            expand_pattern(C2, [2]), [[1, 1, 2, 2], [1, 1, 2, 2], [2, 2, 3, 3], [2, 2, 3, 3]]
        )
        with self.assertRaises(ParameterDomainError):
            expand_pattern(C2, [1, 1])


class TestPatternProbability(unittest.TestCase):
    def test_vacuum_pattern(self):
        G = CovarianceMatrix(np.diag([0.3, 0.5]), np.diag([0.2, 0.1j]))
        log_norm, _ = correlation_kernel(G)
        self.assertAlmostEqual(pattern_probability(G, [0, 0]), np.exp(-0.5 * log_norm))

    def test_thermal(self):
        eta = 0.9
        for engine in ENGINES + ["auto"]:
            for n in range(8):
                self.assertAlmostEqual(pattern_probability(thermal(eta), [n], engine), thermal_probability(eta, n))

    def test_squeezed_vacuum(self):
        r = 0.8
        G = squeezed_vacuum(r, phase=1.1)
        for engine in ENGINES:
            self.assertLessEqual(pattern_probability(G, [1], engine), 1e-12)
            self.assertLessEqual(pattern_probability(G, [3], engine), 1e-12)
            self.assertAlmostEqual(pattern_probability(G, [2], engine), np.tanh(r) ** 2 / (2 * np.cosh(r)))
            self.assertAlmostEqual(pattern_probability(G, [6], engine), squeezed_vacuum_probability(r, 6))

    def test_hot_thermal_up_to_ceiling(self):
        eta = 10.0
        table = enumerate_distribution(thermal(eta), MAX_TOTAL_CUTOFF[1])
        self.assertEqual(len(table.patterns), MAX_TOTAL_CUTOFF[1] + 1)
        for (n,), p in table.entries:
            expected = thermal_probability(eta, n)
            self.assertLessEqual(abs(p - expected), 1e-9 * expected)

    def test_squeezed_vacuum_large_count(self):
        r = 0.8
        G = squeezed_vacuum(r, phase=0.4)
        for n in (40, 60):
            expected = squeezed_vacuum_probability(r, n)
            self.assertLessEqual(abs(pattern_probability(G, [n]) - expected), 1e-9 * expected)

    def test_factorization(self):
        etas = [0.4, 1.3]
        G = CovarianceMatrix(np.diag(etas), np.zeros((2, 2)), ModeLayout(m_ph=2))
        for n in [(0, 1), (2, 3), (1, 0)]:
            expected = thermal_probability(etas[0], n[0]) * thermal_probability(etas[1], n[1])
            self.assertAlmostEqual(pattern_probability(G, n), expected)

    def test_permutation_equivariance(self):
        N = np.array([[0.5, 0.1 + 0.05j], [0.1 - 0.05j, 0.3]])
        A = np.array([[0.2, 0.05], [0.05, 0.1j]])
        G = CovarianceMatrix(N, A)
        swapped = CovarianceMatrix(N[::-1, ::-1], A[::-1, ::-1])
        for n in [(1, 2), (3, 0), (2, 2)]:
            self.assertAlmostEqual(pattern_probability(G, n), pattern_probability(swapped, n[::-1]))

    def test_engines_agree(self):
        N = np.array([[0.5, 0.1 + 0.05j], [0.1 - 0.05j, 0.3]])
        A = np.array([[0.2, 0.05], [0.05, 0.1j]])
        G = CovarianceMatrix(N, A)
        for n in [(1, 1), (2, 3), (4, 0)]:
            values = [pattern_probability(G, n, engine) for engine in ENGINES]
            self.assertAlmostEqual(max(values) - min(values), 0.0, places=12)

    def test_invalid(self):
        with self.assertRaises(ParameterDomainError):
            pattern_probability(thermal(0.5, 2), [1])
        with self.assertRaises(ParameterDomainError):
            pattern_probability(thermal(0.5), [-1])
        with self.assertRaises(ParameterDomainError):
            pattern_probability(thermal(0.5), [1], engine="loop")
