"""Bogoliubov-de Gennes diagonalization and Bloch-Messiah reduction of quadratic bosonic Hamiltonians."""
import logging
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import InstabilityError, ParameterDomainError
from .model import GrandDynamicalMatrix

HERMITICITY_TOLERANCE = 1e-10
SPECTRUM_IMAG_TOLERANCE = 1e-8
SPECTRUM_ZERO_TOLERANCE = 1e-10
DEGENERACY_TOLERANCE = 1e-8
PSEUDO_UNITARITY_TOLERANCE = 1e-10

HamiltonianLike = Union[GrandDynamicalMatrix, np.ndarray]


def symplectic_form(M: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(M), -np.ones(M)]))


class BogoliubovTransform:
    """R = [[U, V*], [V, U*]] mapping quasiparticle operators y = (B†, B) to modes x = R y."""

    __slots__ = ["__U", "__V", "__energies"]

    def __init__(self, U: np.ndarray, V: np.ndarray, energies: Optional[Sequence[float]] = None):
        U, V = np.asarray(U, dtype=complex), np.asarray(V, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape != V.shape:
            raise ParameterDomainError(f"U and V must be square and of equal shape, got {U.shape} and {V.shape}")
        self.__U = U
        self.__V = V
        self.__energies = None if energies is None else np.asarray(energies, dtype=float)
        if self.__energies is not None and self.__energies.shape != (U.shape[0],):
            raise ParameterDomainError(f"expected {U.shape[0]} energies, got {self.__energies.size}")

    @classmethod
    def identity(cls, M: int) -> "BogoliubovTransform":
        return cls(np.eye(M), np.zeros((M, M)))

    @classmethod
    def from_matrix(cls, R: np.ndarray, energies: Optional[Sequence[float]] = None) -> "BogoliubovTransform":
        M = R.shape[0] // 2
        return cls(R[:M, :M], R[M:, :M], energies)

    @property
    def U(self) -> np.ndarray:
        return self.__U

    @property
    def V(self) -> np.ndarray:
        return self.__V

    @property
    def energies(self) -> Optional[np.ndarray]:
        return self.__energies

    @property
    def M(self) -> int:
        return self.__U.shape[0]

    @property
    def R(self) -> np.ndarray:
        U, V = self.__U, self.__V
        return np.block([[U, V.conj()], [V, U.conj()]])

    def with_phases(self, phases: Sequence[complex]) -> "BogoliubovTransform":
        """Same transform with quasiparticle j redefined as e^{iθ_j} B_j."""
        p = np.asarray(phases, dtype=complex)
        return BogoliubovTransform(self.__U * p, self.__V * p, self.__energies)

    def diagonalization_residual(self, H: HamiltonianLike) -> float:
        """max |R† H R - diag(E, E)|."""
        if self.__energies is None:
            raise ParameterDomainError("transform carries no quasiparticle energies")
        R = self.R
        D = np.diag(np.concatenate([self.__energies, self.__energies]))
        return float(np.max(np.abs(R.conj().T @ _matrix(H) @ R - D)))


class BlochMessiahFactors:
    """R = diag(U1, U1*) · [[cosh r, sinh r], [sinh r, cosh r]] · diag(U2, U2*)."""

    __slots__ = ["U1", "U2", "r"]

    def __init__(self, U1: np.ndarray, U2: np.ndarray, r: np.ndarray):
        self.U1 = U1
        self.U2 = U2
        self.r = r

    def reconstruct(self) -> np.ndarray:
        c, s = np.diag(np.cosh(self.r)), np.diag(np.sinh(self.r))
        left = scipy.linalg.block_diag(self.U1, self.U1.conj())
        right = scipy.linalg.block_diag(self.U2, self.U2.conj())
        return left @ np.block([[c, s], [s, c]]) @ right

    def reconstruction_residual(self, R: BogoliubovTransform) -> float:
        return float(np.max(np.abs(R.R - self.reconstruct())))

    def unitarity_residual(self) -> float:
        eye = np.eye(len(self.r))
        return float(
            max(np.max(np.abs(self.U1 @ self.U1.conj().T - eye)), np.max(np.abs(self.U2 @ self.U2.conj().T - eye)))
        )


def solve_bdg(H: HamiltonianLike) -> BogoliubovTransform:
    """Solve J H R = R diag(E, -E) for R with R† J R = J and energies sorted ascending.

    Raises:
        ParameterDomainError: H is not Hermitian.
        InstabilityError: J H has complex or (near) zero eigenvalues, or a positive-energy mode has negative J-norm.
    """
    matrix = _hermitian(H)
    M = matrix.shape[0] // 2
    J = symplectic_form(M)
    scale = max(float(np.linalg.norm(matrix, 2)), np.finfo(float).tiny)

    eigvals, eigvecs = np.linalg.eig(J @ matrix)
    if np.max(np.abs(eigvals.imag)) > SPECTRUM_IMAG_TOLERANCE * scale:
        raise InstabilityError(
            f"J H has complex eigenvalues (max imaginary part {np.max(np.abs(eigvals.imag)):.3g}); "
            "state not thermalizable"
        )
    energies = eigvals.real
    if np.min(np.abs(energies)) <= SPECTRUM_ZERO_TOLERANCE * scale:
        raise InstabilityError(f"J H has a zero eigenvalue (|E| = {np.min(np.abs(energies)):.3g}); no thermal state")

    positive = np.flatnonzero(energies > 0)
    if len(positive) != M:
        raise InstabilityError(f"expected {M} positive eigenvalues of J H, found {len(positive)}")
    positive = positive[np.argsort(energies[positive], kind="stable")]
    E = energies[positive]
    vecs = eigvecs[:, positive]

    columns: List[np.ndarray] = []
    for group in _degenerate_groups(E, DEGENERACY_TOLERANCE * scale):
        columns.extend(_j_gram_schmidt(vecs[:, group], J))
    C = np.stack(columns, axis=1)

    U, V = C[:M], C[M:]
    U, V = _canonical_phases(U, V)
    logging.debug("bdg energies %s", E)
    return BogoliubovTransform(U, V, E)


def check_pseudo_unitarity(R: BogoliubovTransform) -> float:
    """max-norm residual of R† J R - J and of R R⁻¹ - 1 with R⁻¹ = J R† J."""
    Rm = R.R
    J = symplectic_form(R.M)
    pseudo = np.max(np.abs(Rm.conj().T @ J @ Rm - J))
    inverse = np.max(np.abs(Rm @ (J @ Rm.conj().T @ J) - np.eye(2 * R.M)))
    return float(max(pseudo, inverse))


def bloch_messiah(R: BogoliubovTransform) -> BlochMessiahFactors:
    """Factor R into passive unitaries and single-mode squeezers, r sorted descending.

    From V = W sinh(r) Q† the matrix Z = Wᵀ U Q is block-diagonal over groups of equal r; each block fixes the
    residual unitary freedom of the group.
    """
    residual = check_pseudo_unitarity(R)
    scale = max(1.0, float(np.max(np.abs(R.R))) ** 2)
    if residual > PSEUDO_UNITARITY_TOLERANCE * scale:
        raise ParameterDomainError(f"transform is not pseudo-unitary (residual {residual:.3g})")
    M = R.M
    W, s, Qh = np.linalg.svd(R.V)
    cosh = np.sqrt(1 + s**2)
    Z = W.T @ R.U @ Qh.conj().T

    D1 = np.zeros((M, M), dtype=complex)
    D2 = np.zeros((M, M), dtype=complex)
    tol = DEGENERACY_TOLERANCE * max(1.0, float(s[0]) if M else 1.0)
    for group in _degenerate_groups(s, tol):
        block = np.ix_(group, group)
        Zb = Z[block]
        if s[group[-1]] <= tol:
            # unsqueezed modes: R acts as the plain unitary Z_b
            D1[block] = np.eye(len(group))
            D2[block] = Zb / cosh[group][:, None]
        else:
            Y = Zb.conj() / np.mean(cosh[group])
            Y = (Y + Y.T) / 2
            D = scipy.linalg.sqrtm(Y)
            D1[block] = D
            D2[block] = D.conj().T

    U1 = (W @ D1).conj()
    U2 = D2 @ Qh
    return BlochMessiahFactors(U1=U1, U2=U2, r=np.arcsinh(s))


def _matrix(H: HamiltonianLike) -> np.ndarray:
    return H.matrix if isinstance(H, GrandDynamicalMatrix) else np.asarray(H, dtype=complex)


def _hermitian(H: HamiltonianLike) -> np.ndarray:
    matrix = _matrix(H)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise ParameterDomainError(f"H must be a square matrix of even order, got shape {matrix.shape}")
    residual = np.max(np.abs(matrix - matrix.conj().T))
    if residual > HERMITICITY_TOLERANCE * max(1.0, float(np.max(np.abs(matrix)))):
        raise ParameterDomainError(f"H is not Hermitian (residual {residual:.3g})")
    return (matrix + matrix.conj().T) / 2


def _degenerate_groups(values: np.ndarray, tol: float) -> List[List[int]]:
    """Consecutive runs of sorted values closer than tol."""
    groups: List[List[int]] = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _j_gram_schmidt(vecs: np.ndarray, J: np.ndarray) -> List[np.ndarray]:
    """Orthonormalize under <u, v> = u† J v, pivoting on largest J-norm (ties: lowest column index)."""
    remaining = [vecs[:, k].copy() for k in range(vecs.shape[1])]
    basis: List[np.ndarray] = []
    while remaining:
        norms = np.array([np.real(v.conj() @ J @ v) for v in remaining])
        k = int(np.argmax(norms))
        if norms[k] <= 0:
            raise InstabilityError("positive-energy mode with non-positive J-norm; no thermal state")
        u = remaining.pop(k) / np.sqrt(norms[k])
        basis.append(u)
        remaining = [v - (u.conj() @ J @ v) * u for v in remaining]
    return basis


def _canonical_phases(U: np.ndarray, V: np.ndarray):
    """Make the largest-magnitude component of every U column real and positive."""
    rows = np.argmax(np.abs(U), axis=0)
    pivots = U[rows, np.arange(U.shape[1])]
    phases = pivots / np.abs(pivots)
    return U / phases, V / phases
