"""Shared states, Hamiltonians and independent reference formulas for the tests."""
import json
import math
from typing import Tuple

import numpy as np
import scipy.linalg

from hybridgbs.api.v1.common import complex_entries
from hybridgbs.kernel.gaussian import CovarianceMatrix
from hybridgbs.kernel.model import ModeLayout, ToyParams


def rng(seed: int = 1234) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_hermitian(gen: np.random.Generator, M: int) -> np.ndarray:
    a = gen.normal(size=(M, M)) + 1j * gen.normal(size=(M, M))
    return (a + a.conj().T) / 2


def random_symmetric(gen: np.random.Generator, M: int) -> np.ndarray:
    a = gen.normal(size=(M, M)) + 1j * gen.normal(size=(M, M))
    return (a + a.T) / 2


def structured(h: np.ndarray, X: np.ndarray) -> np.ndarray:
    """[[h*, X], [X*, h]] for Hermitian h and symmetric X."""
    return np.block([[h.conj(), X], [X.conj(), h]])


def random_stable_hamiltonian(gen: np.random.Generator, M: int, squeezing: float = 0.5) -> np.ndarray:
    """Positive-definite grand-dynamical matrix; positivity guarantees a real, gapped J H spectrum."""
    K = structured(random_hermitian(gen, M), squeezing * random_symmetric(gen, M))
    shift = abs(float(np.min(np.linalg.eigvalsh(K)))) + 0.5
    return K + shift * np.eye(2 * M)


def random_symplectic(gen: np.random.Generator, M: int, scale: float = 0.4) -> np.ndarray:
    """R = exp(i J K) with structured Hermitian K, which satisfies R† J R = J."""
    J = np.diag(np.concatenate([np.ones(M), -np.ones(M)]))
    K = structured(random_hermitian(gen, M), random_symmetric(gen, M)) * scale
    return scipy.linalg.expm(1j * J @ K)


def thermal(eta: float, M: int = 1) -> CovarianceMatrix:
    return CovarianceMatrix(eta * np.eye(M), np.zeros((M, M)), ModeLayout(m_ph=M))


def squeezed_vacuum(r: float, phase: float = 0.0) -> CovarianceMatrix:
    return CovarianceMatrix(
        [[np.sinh(r) ** 2]], [[np.exp(1j * phase) * np.sinh(r) * np.cosh(r)]], ModeLayout(m_ph=1)
    )


def single_mode(eta: float, alpha: complex) -> CovarianceMatrix:
    return CovarianceMatrix([[eta]], [[alpha]], ModeLayout(m_ph=1))


def thermal_probability(eta: float, n: int) -> float:
    return eta**n / (1 + eta) ** (n + 1)


def squeezed_vacuum_probability(r: float, n: int) -> float:
    if n % 2:
        return 0.0
    k = n // 2
    return math.comb(n, k) * (np.tanh(r) / 2) ** n / np.cosh(r)


def toy_ground_state(p: ToyParams) -> Tuple[np.ndarray, np.ndarray]:
    """(N, A) of the toy ground state from the quadrature form ½ qᵀ(h + X)q + ½ pᵀ(h - X)p."""
    w, e, g = p.hbar_omega + p.photon_shift, p.epsilon + p.atom_shift, p.gamma
    potential = np.array([[w, 2 * g], [2 * g, e]])
    kinetic_sqrt = np.diag(np.sqrt([w, e]))
    omega = np.real(scipy.linalg.sqrtm(kinetic_sqrt @ potential @ kinetic_sqrt))
    qq = 0.5 * kinetic_sqrt @ np.linalg.inv(omega) @ kinetic_sqrt
    kinetic_isqrt = np.linalg.inv(kinetic_sqrt)
    pp = 0.5 * kinetic_isqrt @ omega @ kinetic_isqrt
    return (qq + pp) / 2 - np.eye(2) / 2, (qq - pp) / 2


def write_json(path: str, data) -> str:
    with open(path, "w") as f:
        json.dump(data, f)
    return path


def covariance_json(G: CovarianceMatrix) -> dict:
    return {"m_ph": G.layout.m_ph, "m_at": G.layout.m_at, "N": complex_entries(G.N), "A": complex_entries(G.A)}
