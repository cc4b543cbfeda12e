"""Independent ground truth for the hafnian pipeline.

Two engines: the density matrix exp(-H_eff/T)/Z on a truncated Fock space, and Taylor coefficients of the
characteristic function extracted by discrete Fourier inversion on a polydisc.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CutoffError, NumericalConsistencyError, ParameterDomainError, SizeGuardError
from .gaussian import CovarianceMatrix, _principal_log_det, correlation_kernel
from .model import GrandDynamicalMatrix, ModeLayout
from .occupation_distrib import ProbabilityTable
from .sampler import patterns_up_to
from .symplectic import HamiltonianLike, _hermitian, solve_bdg

MAX_ORACLE_MODES = 3
MAX_CUTOFF = 16
MAX_DIMENSION = 1 << 24
START_CUTOFF = 8
CUTOFF_STEP = 4
DRIFT_TOLERANCE = 1e-8
LEAKAGE_TOLERANCE = 1e-8
SERIES_RADIUS = 0.5
SERIES_ALIASING = 1e-12
MAX_SERIES_POINTS = 1 << 22
SERIES_CHUNK = 1 << 14


@dataclass(frozen=True)
class FockTruncation:
    cutoff_per_mode: int
    modes: int

    def __post_init__(self):
        if self.cutoff_per_mode < 1:
            raise ParameterDomainError(f"cutoff must be positive, got {self.cutoff_per_mode}")
        if self.modes > MAX_ORACLE_MODES or self.cutoff_per_mode > MAX_CUTOFF:
            raise SizeGuardError(
                f"Fock oracle limited to {MAX_ORACLE_MODES} modes and cutoff {MAX_CUTOFF}, "
                f"got {self.modes} modes with cutoff {self.cutoff_per_mode}"
            )
        if self.dimension > MAX_DIMENSION:
            raise SizeGuardError(f"Fock space dimension {self.dimension} exceeds {MAX_DIMENSION}")

    @property
    def dimension(self) -> int:
        return (self.cutoff_per_mode + 1) ** self.modes


class FockDensityMatrix:
    """Density matrix on the truncated Fock space, modes in layout order, mode 0 most significant."""

    __slots__ = ["__rho", "__truncation", "__layout"]

    def __init__(self, rho: np.ndarray, truncation: FockTruncation, layout: ModeLayout):
        self.__rho = rho
        self.__truncation = truncation
        self.__layout = layout

    @property
    def rho(self) -> np.ndarray:
        return self.__rho

    @property
    def truncation(self) -> FockTruncation:
        return self.__truncation

    @property
    def layout(self) -> ModeLayout:
        return self.__layout

    @property
    def cutoff(self) -> int:
        return self.__truncation.cutoff_per_mode

    @property
    def leakage(self) -> float:
        """Population of states with some mode at the cutoff, where truncation is felt."""
        c = self.cutoff
        occupations = self.occupations()
        return float(occupations[np.any(np.indices(occupations.shape) == c, axis=0)].sum())

    def occupations(self) -> np.ndarray:
        """Joint number distribution, one axis per mode."""
        shape = (self.cutoff + 1,) * self.__truncation.modes
        return np.real(np.diag(self.__rho)).reshape(shape)

    def marginal_distribution(self, modes: Sequence[int]) -> np.ndarray:
        modes = list(modes)
        others = tuple(k for k in range(self.__truncation.modes) if k not in modes)
        marginal = self.occupations().sum(axis=others)
        kept = sorted(modes)
        return np.moveaxis(marginal, [kept.index(k) for k in modes], range(len(modes)))

    def ladder(self, mode: int) -> sp.csr_matrix:
        return _ladder_operators(self.cutoff, self.__truncation.modes)[mode]

    def expectation(self, operator) -> complex:
        return complex((operator @ self.__rho).trace())

    def correlators(self, mode: int):
        """(⟨b†b⟩, ⟨bb⟩) of one mode."""
        b = self.ladder(mode)
        return self.expectation(b.conj().T @ b).real, self.expectation(b @ b)

    def wick_fourth_moment(self, mode: int) -> float:
        b = self.ladder(mode)
        bd = b.conj().T
        return self.expectation(bd @ bd @ b @ b).real


def fock_density_matrix(
    H: HamiltonianLike,
    T: float,
    trunc: Optional[FockTruncation] = None,
    *,
    start_cutoff: int = START_CUTOFF,
    cutoff_step: int = CUTOFF_STEP,
    max_cutoff: int = MAX_CUTOFF,
    drift_tolerance: float = DRIFT_TOLERANCE,
    leakage_tolerance: float = LEAKAGE_TOLERANCE,
) -> FockDensityMatrix:
    """ρ ∝ exp(-H_eff/T) for T > 0, the ground-state projector for T = 0.

    Without an explicit truncation the cutoff escalates from start_cutoff in steps of cutoff_step; a cutoff is
    accepted when the joint number distribution moved by less than drift_tolerance per pattern since the
    previous step.

    Raises:
        CutoffError: leakage above tolerance, or no accepted cutoff up to max_cutoff.
    """
    if T < 0 or not np.isfinite(T):
        raise ParameterDomainError(f"temperature must be finite and nonnegative, got {T}")
    matrix = _hermitian(H)
    solve_bdg(matrix)
    M = matrix.shape[0] // 2
    layout = H.layout if isinstance(H, GrandDynamicalMatrix) else ModeLayout(m_ph=M)

    if trunc is not None:
        if trunc.modes != M:
            raise ParameterDomainError(f"truncation is for {trunc.modes} modes, H has {M}")
        rho = _thermal_state(matrix, T, trunc, layout)
        if rho.leakage > leakage_tolerance:
            raise CutoffError(f"leakage {rho.leakage:.3g} at cutoff {trunc.cutoff_per_mode} above {leakage_tolerance}")
        return rho

    cutoff = start_cutoff
    previous = _thermal_state(matrix, T, FockTruncation(cutoff, M), layout)
    while cutoff + cutoff_step <= max_cutoff:
        cutoff += cutoff_step
        current = _thermal_state(matrix, T, FockTruncation(cutoff, M), layout)
        window = tuple(slice(0, previous.cutoff + 1) for _ in range(M))
        drift = float(np.max(np.abs(current.occupations()[window] - previous.occupations())))
        logging.info("fock cutoff %d: drift %.3g, leakage %.3g", cutoff, drift, current.leakage)
        if drift < drift_tolerance and current.leakage <= leakage_tolerance:
            return current
        previous = current
    raise CutoffError(f"fock truncation did not converge up to cutoff {max_cutoff} (leakage {previous.leakage:.3g})")


def oracle_probability(rho: FockDensityMatrix, pattern: Sequence[int], layout: Optional[ModeLayout] = None) -> float:
    """Tr(ρ Π_ν |n_ν⟩⟨n_ν| ⊗ 1_atoms)."""
    layout = rho.layout if layout is None else layout
    n = tuple(int(k) for k in pattern)
    if len(n) != layout.m_ph:
        raise ParameterDomainError(f"pattern {n} must have one count per photon mode ({layout.m_ph})")
    if any(k < 0 or k > rho.cutoff for k in n):
        raise CutoffError(f"pattern {n} outside the truncated space (cutoff {rho.cutoff})")
    if any(k == rho.cutoff for k in n):
        logging.warning("pattern %s touches the truncation boundary; leakage %.3g", n, rho.leakage)
    return float(rho.marginal_distribution(layout.photon_modes)[n])


def series_probabilities(G: CovarianceMatrix, total_cutoff: int, radius: float = SERIES_RADIUS) -> ProbabilityTable:
    """Taylor coefficients of Θ at z = 0 by discrete Fourier inversion on |z_j| = radius.

    The grid has L = max(cutoff + 1, ⌈log(1e-12)/log(radius)⌉) points per mode so aliased coefficients are
    suppressed by radius^L.
    """
    if not 0 < radius < 1:
        raise ParameterDomainError(f"series radius must lie in (0, 1), got {radius}")
    if total_cutoff < 0:
        raise ParameterDomainError(f"cutoff must be nonnegative, got {total_cutoff}")
    log_norm, K = correlation_kernel(G)
    norm_K = float(np.linalg.norm(K, 2))
    if norm_K >= 1:
        raise ParameterDomainError(f"Taylor series of the characteristic function diverges (||K|| = {norm_K:.6g})")
    M = G.M
    L = max(total_cutoff + 1, math.ceil(math.log(SERIES_ALIASING) / math.log(radius)))
    if L**M > MAX_SERIES_POINTS:
        raise SizeGuardError(f"series grid of {L}^{M} points exceeds {MAX_SERIES_POINTS}")

    roots = radius * np.exp(2j * np.pi * np.arange(L) / L)
    grid = np.array(list(itertools.product(roots, repeat=M)))
    values = np.empty(len(grid), dtype=complex)
    for start in range(0, len(grid), SERIES_CHUNK):
        chunk = grid[start : start + SERIES_CHUNK]
        values[start : start + len(chunk)] = np.exp(-0.5 * log_norm - 0.5 * _principal_log_det(K, chunk))
    coefficients = np.fft.fftn(values.reshape((L,) * M)) / L**M

    patterns = patterns_up_to(M, total_cutoff)
    probabilities = []
    for n in patterns:
        p = coefficients[n] / radius ** sum(n)
        if abs(p.imag) > 1e-9 or p.real < -1e-9:
            raise NumericalConsistencyError(f"series coefficient of pattern {n} is {p:.3g}")
        probabilities.append(max(p.real, 0.0))
    return ProbabilityTable(patterns, probabilities, total_cutoff)


def _ladder_operators(cutoff: int, modes: int):
    a = sp.diags(np.sqrt(np.arange(1, cutoff + 1)), offsets=1, format="csr")
    eye = sp.identity(cutoff + 1, format="csr")
    ops = []
    for j in range(modes):
        factors = [a if k == j else eye for k in range(modes)]
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op.astype(complex))
    return ops


def _effective_hamiltonian(matrix: np.ndarray, cutoff: int) -> np.ndarray:
    """Σ h_ij b†_i b_j + ½ Σ X_ij b_i b_j + ½ Σ X*_ij b†_i b†_j, normal ordered (constants dropped)."""
    M = matrix.shape[0] // 2
    h, X = matrix[M:, M:], matrix[:M, M:]
    b = _ladder_operators(cutoff, M)
    bd = [op.conj().T.tocsr() for op in b]
    H = sp.csr_matrix(b[0].shape, dtype=complex)
    for i in range(M):
        for j in range(M):
            if h[i, j] != 0:
                H = H + h[i, j] * (bd[i] @ b[j])
            if X[i, j] != 0:
                H = H + 0.5 * X[i, j] * (b[i] @ b[j]) + 0.5 * np.conj(X[i, j]) * (bd[i] @ bd[j])
    dense = H.toarray()
    return (dense + dense.conj().T) / 2


def _thermal_state(matrix: np.ndarray, T: float, trunc: FockTruncation, layout: ModeLayout) -> FockDensityMatrix:
    energies, vectors = np.linalg.eigh(_effective_hamiltonian(matrix, trunc.cutoff_per_mode))
    if T == 0:
        weights = np.zeros_like(energies)
        weights[0] = 1.0
    else:
        weights = np.exp(-(energies - energies[0]) / T)
        weights /= weights.sum()
    rho = (vectors * weights) @ vectors.conj().T
    return FockDensityMatrix((rho + rho.conj().T) / 2, trunc, layout)
