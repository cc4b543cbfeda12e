"""Grand-dynamical matrices of hybrid atom-photon systems.

The operator vector is ordered (a_1..a_mph, A_1..A_mat, a†_1..a†_mph, A†_1..A†_mat) on the left of H and
(a†, A†, a, A) on the right, so that H_eff = ½ x† H x with x = (b†, b). The lower-right M×M super-block holds the
co-rotating b† b coefficients, the upper-right super-block the counter-rotating b b coefficients.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import AssemblyError, IngestionError, ParameterDomainError

ArrayLike = Union[Sequence, np.ndarray]

GRID_NORMALIZATION_TOLERANCE = 1e-6
BLOCK_HERMITICITY_TOLERANCE = 1e-8
STRUCTURE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ModeLayout:
    m_ph: int
    m_at: int = 0

    def __post_init__(self):
        if int(self.m_ph) != self.m_ph or int(self.m_at) != self.m_at:
            raise ParameterDomainError(f"mode counts must be integers, got m_ph={self.m_ph}, m_at={self.m_at}")
        if self.m_ph < 1:
            raise ParameterDomainError(f"at least one photon mode required, got m_ph={self.m_ph}")
        if self.m_at < 0:
            raise ParameterDomainError(f"atomic mode count must be nonnegative, got m_at={self.m_at}")

    @property
    def M(self) -> int:
        return self.m_ph + self.m_at

    @property
    def photon_modes(self) -> range:
        return range(self.m_ph)

    @property
    def atom_modes(self) -> range:
        return range(self.m_ph, self.M)


@dataclass(frozen=True)
class ToyParams:
    """Toy model: one photon mode coupled to identical atomic modes; energies in a single unit (usually ε).

    With the defaults (one atomic mode, no atom-atom counter-rotating term) this is the two-mode toy. Each atomic
    mode couples to the photon with γ in both the co- and counter-rotating channel; ``atom_counter_rotating`` fills
    every entry of the atom-atom counter-rotating block.
    """

    hbar_omega: float = 2.0
    epsilon: float = 1.0
    gamma: float = 0.5
    N0: float = 1.0
    Q0: float = 7.0
    atom_modes: int = 1
    atom_counter_rotating: float = 0.0

    def __post_init__(self):
        if int(self.atom_modes) != self.atom_modes or self.atom_modes < 1:
            raise ParameterDomainError(f"atom_modes must be a positive integer, got {self.atom_modes}")
        values = (self.hbar_omega, self.epsilon, self.gamma, self.N0, self.Q0, self.atom_counter_rotating)
        if not all(np.isfinite(v) for v in values):
            raise ParameterDomainError(f"toy parameters must be finite, got {values}")
        if self.epsilon <= 0 or self.hbar_omega <= 0:
            raise ParameterDomainError(
                f"bare energies must be positive, got hbar_omega={self.hbar_omega}, epsilon={self.epsilon}"
            )
        if self.N0 <= 0 or self.Q0 <= 0:
            raise ParameterDomainError(f"occupations must be positive, got N0={self.N0}, Q0={self.Q0}")

    @property
    def photon_shift(self) -> float:
        return 2 * self.gamma * np.sqrt(self.N0 / self.Q0)

    @property
    def atom_shift(self) -> float:
        return 2 * self.gamma * np.sqrt(self.Q0 / self.N0)


class HamiltonianBlocks:
    """Co- and counter-rotating blocks of a hybrid Hamiltonian.

    The photon-photon counter-rotating block is identically zero and therefore not stored.
    """

    __slots__ = ["__eps_ph", "__S_ph", "__S_at_ph", "__S_at_ph_tilde", "__eps_at_plus_S_at", "__S_at_tilde"]

    def __init__(
        self,
        eps_ph: ArrayLike,
        S_ph: Optional[ArrayLike] = None,
        S_at_ph: Optional[ArrayLike] = None,
        S_at_ph_tilde: Optional[ArrayLike] = None,
        eps_at_plus_S_at: Optional[ArrayLike] = None,
        S_at_tilde: Optional[ArrayLike] = None,
    ):
        """Create Hamiltonian blocks; omitted blocks are zero.

        Args:
            eps_ph: bare photon energies ℏω_ν, as a vector or a diagonal m_ph×m_ph matrix.
            S_ph: photon-photon co-rotating block, m_ph×m_ph Hermitian.
            S_at_ph: atom-photon co-rotating block, m_ph×m_at.
            S_at_ph_tilde: atom-photon counter-rotating block, m_ph×m_at.
            eps_at_plus_S_at: atom-atom co-rotating block, m_at×m_at Hermitian.
            S_at_tilde: atom-atom counter-rotating block, m_at×m_at symmetric.
        """
        eps = np.asarray(eps_ph, dtype=float)
        if eps.ndim == 2:
            if np.any(eps != np.diag(np.diag(eps))):
                raise AssemblyError("eps_ph must be diagonal")
            eps = np.diag(eps).copy()
        if eps.ndim != 1 or len(eps) < 1:
            raise AssemblyError(f"eps_ph must hold one energy per photon mode, got shape {eps.shape}")
        m_ph = len(eps)
        m_at = _infer_atom_count(S_at_ph, S_at_ph_tilde, eps_at_plus_S_at, S_at_tilde)
        self.__eps_ph = eps
        self.__S_ph = _block(S_ph, (m_ph, m_ph), "S_ph")
        self.__S_at_ph = _block(S_at_ph, (m_ph, m_at), "S_at_ph")
        self.__S_at_ph_tilde = _block(S_at_ph_tilde, (m_ph, m_at), "S_at_ph_tilde")
        self.__eps_at_plus_S_at = _block(eps_at_plus_S_at, (m_at, m_at), "eps_at_plus_S_at")
        self.__S_at_tilde = _block(S_at_tilde, (m_at, m_at), "S_at_tilde")
        _check_hermitian(self.__S_ph, "S_ph")
        _check_hermitian(self.__eps_at_plus_S_at, "eps_at_plus_S_at")
        scale = max(1.0, float(np.max(np.abs(self.__S_at_tilde), initial=0.0)))
        if np.max(np.abs(self.__S_at_tilde - self.__S_at_tilde.T), initial=0.0) > BLOCK_HERMITICITY_TOLERANCE * scale:
            raise AssemblyError("S_at_tilde must be symmetric")

    @property
    def layout(self) -> ModeLayout:
        return ModeLayout(m_ph=len(self.__eps_ph), m_at=self.__eps_at_plus_S_at.shape[0])

    @property
    def eps_ph(self) -> np.ndarray:
        return self.__eps_ph

    @property
    def S_ph(self) -> np.ndarray:
        return self.__S_ph

    @property
    def S_at_ph(self) -> np.ndarray:
        return self.__S_at_ph

    @property
    def S_at_ph_tilde(self) -> np.ndarray:
        return self.__S_at_ph_tilde

    @property
    def eps_at_plus_S_at(self) -> np.ndarray:
        return self.__eps_at_plus_S_at

    @property
    def S_at_tilde(self) -> np.ndarray:
        return self.__S_at_tilde


class GrandDynamicalMatrix:
    """Hermitian 2M×2M coefficient matrix H of H_eff = ½ x† H x."""

    __slots__ = ["__matrix", "__layout", "__hermiticity_residual"]

    def __init__(self, matrix: ArrayLike, layout: ModeLayout, hermiticity_residual: Optional[float] = None):
        H = np.array(matrix, dtype=complex)
        M = layout.M
        if H.shape != (2 * M, 2 * M):
            raise AssemblyError(f"expected a {2 * M}x{2 * M} matrix for layout {layout}, got shape {H.shape}")
        m = layout.m_ph
        if np.any(H[:m, M : M + m] != 0) or np.any(H[M : M + m, :m] != 0):
            raise AssemblyError("photon-photon counter-rotating blocks must be zero")
        _check_structure(H, M)
        self.__matrix = H
        self.__matrix.flags.writeable = False
        self.__layout = layout
        self.__hermiticity_residual = (
            float(np.max(np.abs(H - H.conj().T))) if hermiticity_residual is None else hermiticity_residual
        )

    @property
    def matrix(self) -> np.ndarray:
        return self.__matrix

    @property
    def layout(self) -> ModeLayout:
        return self.__layout

    @property
    def hermiticity_residual(self) -> float:
        """Largest |H - H†| entry before symmetrization."""
        return self.__hermiticity_residual

    @property
    def co_rotating(self) -> np.ndarray:
        M = self.__layout.M
        return self.__matrix[M:, M:]

    @property
    def counter_rotating(self) -> np.ndarray:
        M = self.__layout.M
        return self.__matrix[:M, M:]


@dataclass(frozen=True)
class PhysicalInputs:
    """Scalar and sampled parameters of the cavity-QED Hamiltonian, in one declared unit system."""

    Delta_a: float
    N0: float
    Q0: float
    g_a: float
    mu: float
    mass: float
    V_tr: np.ndarray
    n_ex: np.ndarray
    hbar: float = 1.0
    photon_energies: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.Delta_a == 0:
            raise ParameterDomainError("atom-pump detuning Delta_a must be nonzero")
        if self.N0 < 1 or self.Q0 < 1:
            raise ParameterDomainError(f"macroscopic occupations must be >= 1, got N0={self.N0}, Q0={self.Q0}")
        if self.mass <= 0:
            raise ParameterDomainError(f"atomic mass must be positive, got {self.mass}")
        object.__setattr__(self, "V_tr", np.asarray(self.V_tr, dtype=float))
        object.__setattr__(self, "n_ex", np.asarray(self.n_ex, dtype=float))
        if self.photon_energies is not None:
            object.__setattr__(self, "photon_energies", np.asarray(self.photon_energies, dtype=float))


class OverlapGrid:
    """Quadrature grid with sampled mode profiles."""

    __slots__ = ["points", "weights", "phi0", "f", "omega", "g", "laplacian_f"]

    def __init__(
        self,
        points: ArrayLike,
        weights: ArrayLike,
        phi0: ArrayLike,
        f: ArrayLike,
        omega: ArrayLike,
        g: ArrayLike,
        laplacian_f: Optional[ArrayLike] = None,
        check_normalization: bool = True,
    ):
        self.weights = np.asarray(weights, dtype=float)
        n = len(self.weights)
        self.points = np.asarray(points, dtype=float).reshape(n, 3) if n > 0 else np.zeros((0, 3))
        self.phi0 = _samples(phi0, n, "phi0")
        self.omega = _samples(omega, n, "omega")
        self.f = _profile_set(f, n, "f")
        self.g = _profile_set(g, n, "g")
        self.laplacian_f = (
            np.zeros_like(self.f) if laplacian_f is None else _profile_set(laplacian_f, n, "laplacian_f")
        )
        if self.laplacian_f.shape != self.f.shape:
            raise IngestionError(
                f"laplacian_f must match f, got {self.laplacian_f.shape[0]} profiles for {self.f.shape[0]}"
            )
        if check_normalization:
            self.check_normalization()

    @property
    def size(self) -> int:
        return len(self.weights)

    def check_normalization(self, tolerance: float = GRID_NORMALIZATION_TOLERANCE):
        w = self.weights
        norm = np.sum(w * np.abs(self.phi0) ** 2)
        if abs(norm - 1) > tolerance:
            raise IngestionError(f"condensate wavefunction not normalized on grid: sum w |phi0|^2 = {norm}")
        if len(self.f) == 0:
            return
        gram = np.einsum("r,jr,kr->jk", w, self.f.conj(), self.f)
        gram_defect = np.max(np.abs(gram - np.eye(len(self.f))))
        if gram_defect > tolerance:
            raise IngestionError(f"excited atomic profiles not orthonormal on grid, defect {gram_defect:.3g}")
        overlap = np.max(np.abs(np.einsum("r,jr,r->j", w, self.f.conj(), self.phi0)))
        if overlap > tolerance:
            raise IngestionError(f"excited atomic profiles overlap the condensate, max overlap {overlap:.3g}")


def build_toy_hamiltonian(p: ToyParams) -> GrandDynamicalMatrix:
    """Toy Hamiltonian: photon (index 0) and atoms (indices 1..atom_modes) with all photon couplings equal to γ.

    For the default two-mode toy the matrix is [[w, g, 0, g], [g, e, g, 0], [0, g, w, g], [g, 0, g, e]].
    """
    k = int(p.atom_modes)
    w = p.hbar_omega + p.photon_shift
    e = p.epsilon + p.atom_shift
    g = p.gamma
    h = np.zeros((k + 1, k + 1), dtype=complex)
    h[0, 0] = w
    h[0, 1:] = h[1:, 0] = g
    h[1:, 1:] = e * np.eye(k)
    x = np.zeros((k + 1, k + 1), dtype=complex)
    x[0, 1:] = x[1:, 0] = g
    x[1:, 1:] = p.atom_counter_rotating
    H = np.block([[h, x], [x, h]])
    return _symmetrized(H, ModeLayout(m_ph=1, m_at=k))


def toy_blocks(p: ToyParams) -> HamiltonianBlocks:
    k = int(p.atom_modes)
    return HamiltonianBlocks(
        eps_ph=[p.hbar_omega],
        S_ph=[[p.photon_shift]],
        S_at_ph=np.full((1, k), p.gamma),
        S_at_ph_tilde=np.full((1, k), p.gamma),
        eps_at_plus_S_at=(p.epsilon + p.atom_shift) * np.eye(k),
        S_at_tilde=np.full((k, k), p.atom_counter_rotating),
    )


def assemble_grand_matrix(b: HamiltonianBlocks, layout: Optional[ModeLayout] = None) -> GrandDynamicalMatrix:
    """Place the blocks into H; co-rotating on the diagonal super-blocks, counter-rotating off-diagonal."""
    if layout is None:
        layout = b.layout
    elif layout != b.layout:
        raise AssemblyError(f"blocks describe {b.layout}, but layout {layout} was requested")
    m, M = layout.m_ph, layout.M
    h = np.zeros((M, M), dtype=complex)
    h[:m, :m] = np.diag(b.eps_ph) + b.S_ph
    h[:m, m:] = b.S_at_ph
    h[m:, :m] = b.S_at_ph.conj().T
    h[m:, m:] = b.eps_at_plus_S_at
    x = np.zeros((M, M), dtype=complex)
    x[:m, m:] = b.S_at_ph_tilde
    x[m:, :m] = b.S_at_ph_tilde.T
    x[m:, m:] = b.S_at_tilde
    H = np.block([[h.conj(), x], [x.conj(), h]])
    return _symmetrized(H, layout)


def blocks_from_overlaps(inp: PhysicalInputs, grid: OverlapGrid, layout: ModeLayout) -> HamiltonianBlocks:
    """Quadrature of the block integrals over the grid."""
    if grid.g.shape[0] != layout.m_ph or grid.f.shape[0] != layout.m_at:
        raise IngestionError(
            f"grid carries {grid.g.shape[0]} photon and {grid.f.shape[0]} atomic profiles, layout expects {layout}"
        )
    n = grid.size
    for name, arr in (("V_tr", inp.V_tr), ("n_ex", inp.n_ex)):
        if arr.shape != (n,):
            raise IngestionError(f"{name} has {arr.size} samples, grid has {n}")
    photon_energies = np.zeros(layout.m_ph) if inp.photon_energies is None else inp.photon_energies
    if photon_energies.shape != (layout.m_ph,):
        raise IngestionError(f"expected {layout.m_ph} photon energies, got {photon_energies.size}")

    w, phi0, omega, f, g = grid.weights, grid.phi0, grid.omega, grid.f, grid.g
    c = inp.hbar / inp.Delta_a
    S_at_ph = c * np.sqrt(inp.N0) * np.einsum("r,r,r,jr,nr->nj", w, phi0.conj(), omega, f, g.conj())
    S_at_ph_tilde = c * np.sqrt(inp.N0) * np.einsum("r,r,r,jr,nr->nj", w, phi0.conj(), omega.conj(), f, g)
    S_ph = c * inp.N0 * np.einsum("r,r,nr,kr->nk", w, np.abs(phi0) ** 2, g.conj(), g)

    potential = inp.V_tr - inp.mu + 2 * inp.g_a * (inp.N0 * np.abs(phi0) ** 2 + inp.n_ex)
    kinetic = -(inp.hbar**2) / (2 * inp.mass) * np.einsum("r,jr,kr->jk", w, f.conj(), grid.laplacian_f)
    eps_at = kinetic + np.einsum("r,jr,r,kr->jk", w, f.conj(), potential, f)
    S_at = c * np.einsum("r,jr,r,kr->jk", w, f.conj(), np.abs(omega) ** 2, f)
    S_at_tilde = inp.g_a * inp.N0 / 2 * np.einsum("r,jr,r,kr->jk", w, f, phi0.conj() ** 2, f)

    # quadrature of a non-self-adjoint discretized Laplacian is Hermitian only approximately
    eps_at_plus_S_at = eps_at + S_at
    eps_at_plus_S_at = (eps_at_plus_S_at + eps_at_plus_S_at.conj().T) / 2
    return HamiltonianBlocks(
        eps_ph=photon_energies,
        S_ph=S_ph,
        S_at_ph=S_at_ph,
        S_at_ph_tilde=S_at_ph_tilde,
        eps_at_plus_S_at=eps_at_plus_S_at,
        S_at_tilde=(S_at_tilde + S_at_tilde.T) / 2,
    )


def _symmetrized(H: np.ndarray, layout: ModeLayout) -> GrandDynamicalMatrix:
    residual = float(np.max(np.abs(H - H.conj().T)))
    return GrandDynamicalMatrix((H + H.conj().T) / 2, layout, hermiticity_residual=residual)


def _check_structure(H: np.ndarray, M: int):
    """H = [[h*, X], [X*, h]] within STRUCTURE_TOLERANCE · max(1, ‖H‖)."""
    tolerance = STRUCTURE_TOLERANCE * max(1.0, float(np.linalg.norm(H, 2)))
    diagonal = float(np.max(np.abs(H[:M, :M] - H[M:, M:].conj())))
    if diagonal > tolerance:
        raise AssemblyError(f"diagonal super-blocks are not complex conjugates, mismatch {diagonal:.3g}")
    off_diagonal = float(np.max(np.abs(H[M:, :M] - H[:M, M:].conj())))
    if off_diagonal > tolerance:
        raise AssemblyError(f"off-diagonal super-blocks are not complex conjugates, mismatch {off_diagonal:.3g}")


def _infer_atom_count(*blocks) -> int:
    for b in blocks:
        if b is not None:
            arr = np.asarray(b)
            if arr.ndim == 2:
                return arr.shape[1]
    return 0


def _block(value: Optional[ArrayLike], shape, name: str) -> np.ndarray:
    if value is None:
        return np.zeros(shape, dtype=complex)
    arr = np.asarray(value, dtype=complex)
    if arr.size == 0 and 0 in shape:
        return np.zeros(shape, dtype=complex)
    if arr.shape != shape:
        raise AssemblyError(f"block {name} must have shape {shape}, got {arr.shape}")
    return arr


def _check_hermitian(block: np.ndarray, name: str):
    if block.size == 0:
        return
    scale = max(1.0, float(np.max(np.abs(block))))
    if np.max(np.abs(block - block.conj().T)) > BLOCK_HERMITICITY_TOLERANCE * scale:
        raise AssemblyError(f"block {name} must be Hermitian")


def _samples(value: ArrayLike, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (n,):
        raise IngestionError(f"{name} has {arr.size} samples, grid has {n}")
    return arr


def _profile_set(value: ArrayLike, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.size == 0:
        return np.zeros((0, n), dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise IngestionError(f"{name} profiles must each have {n} samples, got shape {arr.shape}")
    return arr
