"""Test pseudo-thermal covariance matrices, characteristic functions and single-mode statistics."""
import unittest
from test.data.fixtures import random_stable_hamiltonian, rng, single_mode, squeezed_vacuum, thermal, toy_ground_state

import numpy as np

from hybridgbs.kernel.calculation import GaussianModel
from hybridgbs.kernel.errors import InstabilityError, ParameterDomainError, UnphysicalCovarianceError
from hybridgbs.kernel.gaussian import (
    CovarianceMatrix,
    bose_einstein,
    characteristic_function,
    covariance_from_quasiparticles,
    covariance_via_coth,
    marginal_atoms,
    marginal_modes,
    marginal_photon,
    photon_number_moments,
    single_mode_stats,
    theta_on_points,
)
from hybridgbs.kernel.hafnian import pattern_probability
from hybridgbs.kernel.model import (
    HamiltonianBlocks,
    ModeLayout,
    ToyParams,
    assemble_grand_matrix,
    build_toy_hamiltonian,
)
from hybridgbs.kernel.symplectic import solve_bdg

TOY_GRID = [(gamma, T) for gamma in [0.1, 0.25, 0.5, 1.0, 1.5] for T in [0.05, 0.1, 0.25, 0.5]]


class TestCovariance(unittest.TestCase):
    def test_decoupled_thermal(self):
        T = 0.7
        G = GaussianModel(build_toy_hamiltonian(ToyParams(hbar_omega=2, epsilon=1, gamma=0)), T).covariance
        np.testing.assert_allclose(G.N, np.diag(bose_einstein([2.0, 1.0], T)), atol=1e-14)
        np.testing.assert_allclose(G.A, 0, atol=1e-14)

    def test_zero_temperature_is_depletion(self):
        R = solve_bdg(random_stable_hamiltonian(rng(2), 3))
        G = covariance_from_quasiparticles(R, 0.0)
        Rm = R.R
        np.testing.assert_allclose(G.full(), (Rm @ Rm.conj().T - np.eye(6)) / 2, atol=1e-12)

    def test_toy_ground_state(self):
        for gamma in [0.05, 0.5, 2.0, 10.0]:
            p = ToyParams(gamma=gamma)
            G = GaussianModel(build_toy_hamiltonian(p), 0.0).covariance
            N, A = toy_ground_state(p)
            np.testing.assert_allclose(G.N, N, atol=1e-10)
            np.testing.assert_allclose(G.A, A, atol=1e-10)

    def test_coth_single_mode(self):
        omega, T = 1.3, 0.4
        G = covariance_via_coth(np.diag([omega, omega]), T)
        self.assertAlmostEqual(G.N[0, 0].real, 1 / np.expm1(omega / T))
        self.assertAlmostEqual(abs(G.A[0, 0]), 0.0)

    def test_route_equivalence_toy(self):
        for gamma, T in TOY_GRID:
            H = build_toy_hamiltonian(ToyParams(gamma=gamma))
            by_r = covariance_from_quasiparticles(solve_bdg(H), T)
            by_coth = covariance_via_coth(H, T)
            self.assertLessEqual(np.max(np.abs(by_r.full() - by_coth.full())), 1e-9)

    def test_route_equivalence_random(self):
        gen = rng(21)
        for _ in range(30):
            H = random_stable_hamiltonian(gen, int(gen.integers(1, 5)))
            T = float(gen.uniform(0.1, 3.0))
            by_r = covariance_from_quasiparticles(solve_bdg(H), T)
            self.assertLessEqual(np.max(np.abs(by_r.full() - covariance_via_coth(H, T).full())), 1e-9)

    def test_large_temperature(self):
        omega = 1.0
        T = 100 * omega
        G = covariance_via_coth(np.diag([omega, omega]), T)
        # n = T/ω - 1/2 + O(ω/T)
        self.assertAlmostEqual(G.N[0, 0].real, T / omega - 0.5, places=2)
        H = build_toy_hamiltonian(ToyParams(gamma=0.5))
        R = solve_bdg(H)
        T = 100 * np.linalg.norm(H.matrix, 2)
        G = covariance_via_coth(H, T)
        # every quasiparticle contributes T/E_j weighted by its mode content
        weights = np.abs(R.U) ** 2 + np.abs(R.V) ** 2
        np.testing.assert_allclose(np.diag(G.N).real / T, weights @ (1 / R.energies), rtol=1e-2)

    def test_coth_needs_positive_temperature(self):
        with self.assertRaises(ParameterDomainError):
            covariance_via_coth(np.diag([1.0, 1.0]), 0.0)
        with self.assertRaises(InstabilityError):
            covariance_via_coth(np.array([[1.0, 1.5], [1.5, 1.0]]), 1.0)

    def test_phase_invariance(self):
        R = solve_bdg(random_stable_hamiltonian(rng(9), 4))
        phases = np.exp(1j * rng(10).uniform(0, 2 * np.pi, size=4))
        for T in [0.0, 0.8]:
            G = covariance_from_quasiparticles(R, T).full()
            G_phased = covariance_from_quasiparticles(R.with_phases(phases), T).full()
            self.assertLessEqual(np.max(np.abs(G - G_phased)), 1e-10)

    def test_monotone_in_temperature(self):
        H = build_toy_hamiltonian(ToyParams(gamma=0.8))
        R = solve_bdg(H)
        occupations = np.array([np.diag(covariance_from_quasiparticles(R, T).N).real for T in np.linspace(0, 2, 21)])
        self.assertTrue(np.all(np.diff(occupations, axis=0) >= -1e-12))

    def test_physical(self):
        gen = rng(4)
        for _ in range(20):
            R = solve_bdg(random_stable_hamiltonian(gen, 3))
            G = covariance_from_quasiparticles(R, float(gen.uniform(0, 2)))
            G.validate()
            self.assertLessEqual(G.physicality_residual(), 1e-9)

    def test_unphysical(self):
        with self.assertRaises(UnphysicalCovarianceError):
            single_mode(1.0, 2.0).validate()
        with self.assertRaises(UnphysicalCovarianceError):
            CovarianceMatrix([[0.5, 0.2], [0.1, 0.5]], np.zeros((2, 2))).validate()
        with self.assertRaises(UnphysicalCovarianceError):
            thermal(-0.1).validate()


class TestMarginals(unittest.TestCase):
    def test_without_atoms(self):
        G = thermal(0.3, 2)
        self.assertIs(marginal_photon(G), G)
        with self.assertRaises(ParameterDomainError):
            marginal_atoms(G)

    def test_toy_marginals(self):
        G = GaussianModel(build_toy_hamiltonian(ToyParams(gamma=0.5)), 0.2).covariance
        G_ph, G_at = marginal_photon(G), marginal_atoms(G)
        self.assertEqual(G_ph.layout, ModeLayout(m_ph=1))
        self.assertEqual(G_ph.N[0, 0], G.N[0, 0])
        self.assertEqual(G_at.A[0, 0], G.A[1, 1])
        G_ph.validate()
        G_at.validate()

    def test_block_diagonal(self):
        N = np.diag([0.2, 0.4, 0.1])
        A = np.diag([0.1, 0.0, 0.05j])
        G = CovarianceMatrix(N, A, ModeLayout(m_ph=2, m_at=1))
        np.testing.assert_array_equal(marginal_photon(G).N, N[:2, :2])
        np.testing.assert_array_equal(marginal_photon(G).A, A[:2, :2])

    def test_selection(self):
        G = thermal(0.3, 3)
        with self.assertRaises(ParameterDomainError):
            marginal_modes(G, [0, 0])
        with self.assertRaises(ParameterDomainError):
            marginal_modes(G, [3])
        self.assertEqual(marginal_modes(G, [2, 0]).M, 2)

    def test_no_co_rotating_coupling(self):
        # two-mode squeezing between photon and atom leaves the photon thermal
        blocks = HamiltonianBlocks(eps_ph=[3.0], S_at_ph_tilde=[[0.8]], eps_at_plus_S_at=[[5.0]])
        for T in [0.0, 0.5]:
            G_ph = GaussianModel(assemble_grand_matrix(blocks), T).photon_covariance
            self.assertLessEqual(abs(G_ph.A[0, 0]), 1e-12)
            eta = G_ph.N[0, 0].real
            for n in range(4):
                self.assertAlmostEqual(pattern_probability(G_ph, [n]), eta**n / (1 + eta) ** (n + 1), places=9)


class TestCharacteristicFunction(unittest.TestCase):
    def test_normalization(self):
        gen = rng(6)
        for _ in range(10):
            G = covariance_from_quasiparticles(solve_bdg(random_stable_hamiltonian(gen, 3)), 0.5)
            self.assertAlmostEqual(abs(characteristic_function(G, [1, 1, 1]) - 1), 0.0, places=10)

    def test_thermal_generating_function(self):
        eta = 0.8
        for z in [0.0, 0.5, -0.7, 0.3 + 0.4j, 1.0]:
            expected = 1 / (1 + eta * (1 - z))
            self.assertAlmostEqual(abs(characteristic_function(thermal(eta), [z]) - expected), 0.0, places=12)

    def test_bounded_on_unit_disk(self):
        G = GaussianModel(build_toy_hamiltonian(ToyParams(gamma=1.0)), 0.25).covariance
        for z in [[0.5, -0.5], [1j, 1], [-1, -1], [np.exp(0.3j), np.exp(2.0j)]]:
            self.assertLessEqual(abs(characteristic_function(G, z)), 1 + 1e-10)

    def test_vacuum_probability(self):
        G = marginal_photon(GaussianModel(build_toy_hamiltonian(ToyParams(gamma=1.0)), 0.25).covariance)
        self.assertAlmostEqual(characteristic_function(G, [0]).real, pattern_probability(G, [0]), places=12)

    def test_theta_on_points(self):
        G = thermal(0.5, 2)
        zs = np.array([[0.1, 0.2], [0.3j, -0.4]])
        values = theta_on_points(G, zs)
        for z, v in zip(zs, values):
            self.assertAlmostEqual(abs(v - characteristic_function(G, z)), 0.0, places=12)
        with self.assertRaises(ParameterDomainError):
            theta_on_points(G, np.array([[4.0, 0.0]]))

    def test_argument_count(self):
        with self.assertRaises(ParameterDomainError):
            characteristic_function(thermal(0.5, 2), [0.5])


class TestSingleModeStats(unittest.TestCase):
    def test_vacuum(self):
        s = single_mode_stats(thermal(0.0), 0)
        self.assertEqual(s.r_eff, 0)
        self.assertEqual(s.q_eff, 0)

    def test_thermal(self):
        s = single_mode_stats(thermal(1.0), 0)
        self.assertAlmostEqual(s.alpha_c, np.sqrt(1.5))
        self.assertAlmostEqual(s.alpha_max, np.sqrt(2))
        self.assertAlmostEqual(s.q_eff, 1.0)

    def test_squeezed_vacuum(self):
        r = 0.6
        s = single_mode_stats(squeezed_vacuum(r, phase=0.4), 0)
        self.assertAlmostEqual(s.alpha_abs, s.alpha_max)
        self.assertAlmostEqual(s.q_eff, 0.0, places=7)
        self.assertAlmostEqual(s.r_eff, r, places=5)

    def test_above_bound(self):
        with self.assertRaises(UnphysicalCovarianceError):
            single_mode_stats(single_mode(1.0, 1.5), 0)
        with self.assertRaises(ParameterDomainError):
            single_mode_stats(thermal(1.0), 1)

    def test_toy_below_bound(self):
        for gamma, T in TOY_GRID + [(0.01, 0.0), (10.0, 0.0), (30.0, 0.0)]:
            G = GaussianModel(build_toy_hamiltonian(ToyParams(gamma=gamma)), T).photon_covariance
            s = single_mode_stats(G, 0)
            self.assertLess(s.alpha_abs, s.alpha_max)

    def test_moments(self):
        m = photon_number_moments(single_mode(2.0, 1.0), 0)
        self.assertEqual(m.factorial_second, 9.0)
        self.assertEqual(m.second, 11.0)
        self.assertAlmostEqual(m.g2, 2.25)
        self.assertAlmostEqual(photon_number_moments(thermal(0.7), 0).g2, 2.0)
