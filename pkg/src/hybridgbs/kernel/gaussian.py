"""Covariance matrices of Gaussian pseudo-thermal states and single-mode diagnostics.

G = ½⟨{x, x†}⟩ - ½ with x = (b†, b), i.e. G = [[N, A*], [A, N*]] where N_jk = ⟨b†_j b_k⟩ and A_jk = ⟨b_j b_k⟩.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DivergentOccupationError, InstabilityError, ParameterDomainError, UnphysicalCovarianceError
from .model import GrandDynamicalMatrix, ModeLayout
from .symplectic import (
    SPECTRUM_IMAG_TOLERANCE,
    SPECTRUM_ZERO_TOLERANCE,
    BogoliubovTransform,
    HamiltonianLike,
    _hermitian,
    symplectic_form,
)

HERMITICITY_TOLERANCE = 1e-10
BOUND_TOLERANCE = 1e-9
SINGULARITY_CONDITION = 1e12


class CovarianceMatrix:
    """Normal (N) and anomalous (A) correlator blocks of a zero-mean Gaussian state."""

    __slots__ = ["__N", "__A", "__layout"]

    def __init__(self, N: np.ndarray, A: np.ndarray, layout: Optional[ModeLayout] = None):
        N, A = np.array(N, dtype=complex), np.array(A, dtype=complex)
        if N.ndim != 2 or N.shape[0] != N.shape[1] or N.shape != A.shape:
            raise ParameterDomainError(f"N and A must be square and of equal shape, got {N.shape} and {A.shape}")
        if layout is None:
            layout = ModeLayout(m_ph=N.shape[0])
        if layout.M != N.shape[0]:
            raise ParameterDomainError(f"layout {layout} does not match {N.shape[0]} modes")
        self.__N = N
        self.__A = A
        self.__layout = layout

    @classmethod
    def from_full(cls, G: np.ndarray, layout: Optional[ModeLayout] = None) -> "CovarianceMatrix":
        M = G.shape[0] // 2
        return cls(G[:M, :M], G[M:, :M], layout)

    @classmethod
    def vacuum(cls, layout: ModeLayout) -> "CovarianceMatrix":
        return cls(np.zeros((layout.M, layout.M)), np.zeros((layout.M, layout.M)), layout)

    @property
    def N(self) -> np.ndarray:
        return self.__N

    @property
    def A(self) -> np.ndarray:
        return self.__A

    @property
    def layout(self) -> ModeLayout:
        return self.__layout

    @property
    def M(self) -> int:
        return self.__layout.M

    def full(self) -> np.ndarray:
        return np.block([[self.__N, self.__A.conj()], [self.__A, self.__N.conj()]])

    def physicality_residual(self) -> float:
        """Largest violation among Hermiticity of N, symmetry of A, N ≥ 0, |A_jj|² ≤ N_jj(N_jj + 1) and
        ⟨x x†⟩ ≥ 0; zero for a physical state."""
        N, A = self.__N, self.__A
        herm = np.max(np.abs(N - N.conj().T))
        sym = np.max(np.abs(A - A.T))
        Nh = (N + N.conj().T) / 2
        negativity = max(0.0, -float(np.min(np.linalg.eigvalsh(Nh))))
        n_diag = np.real(np.diag(N))
        bound = max(0.0, float(np.max(np.abs(np.diag(A)) ** 2 - n_diag * (n_diag + 1))))
        G = self.full()
        Gh = (G + G.conj().T) / 2
        # ⟨x x†⟩ = G + ½ - ½J is a Gram matrix
        gram = Gh + np.diag(np.concatenate([np.zeros(self.M), np.ones(self.M)]))
        uncertainty = max(0.0, -float(np.min(np.linalg.eigvalsh(gram))))
        return float(max(herm, sym, negativity, bound, uncertainty))

    def validate(self):
        N, A = self.__N, self.__A
        if np.max(np.abs(N - N.conj().T)) > HERMITICITY_TOLERANCE:
            raise UnphysicalCovarianceError("normal correlator block N is not Hermitian")
        if np.max(np.abs(A - A.T)) > HERMITICITY_TOLERANCE:
            raise UnphysicalCovarianceError("anomalous correlator block A is not symmetric")
        lowest = float(np.min(np.linalg.eigvalsh((N + N.conj().T) / 2)))
        if lowest < -HERMITICITY_TOLERANCE:
            raise UnphysicalCovarianceError(f"N has negative eigenvalue {lowest:.3g}")
        for j in range(self.M):
            eta, alpha = N[j, j].real, abs(A[j, j])
            if alpha**2 > eta * (eta + 1) + BOUND_TOLERANCE:
                raise UnphysicalCovarianceError(
                    f"mode {j}: |alpha| = {alpha:.6g} exceeds alpha_max = {np.sqrt(max(eta * (eta + 1), 0)):.6g}"
                )
        residual = self.physicality_residual()
        if residual > BOUND_TOLERANCE:
            raise UnphysicalCovarianceError(f"covariance violates the uncertainty relation (residual {residual:.3g})")


@dataclass(frozen=True)
class SingleModeStats:
    eta: float
    alpha: complex
    alpha_c: float
    alpha_max: float
    r_eff: float
    q_eff: float

    @property
    def alpha_abs(self) -> float:
        return abs(self.alpha)


@dataclass(frozen=True)
class PhotonNumberMoments:
    mean: float
    factorial_second: float
    second: float
    g2: float


def bose_einstein(E: Union[float, np.ndarray], T: float) -> np.ndarray:
    """Mean occupations 1/(exp(E/T) - 1); zero at T = 0."""
    E = np.asarray(E, dtype=float)
    if T == 0:
        return np.zeros_like(E)
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(E / T)


def covariance_from_quasiparticles(
    R: BogoliubovTransform, T: float, layout: Optional[ModeLayout] = None
) -> CovarianceMatrix:
    """G = R diag(n, n) R† + (R R† - 1)/2 with Bose-Einstein quasiparticle occupations n."""
    if T < 0 or not np.isfinite(T):
        raise ParameterDomainError(f"temperature must be finite and nonnegative, got {T}")
    if R.energies is None:
        raise ParameterDomainError("transform carries no quasiparticle energies")
    if T > 0 and np.any(R.energies <= 0):
        raise DivergentOccupationError(f"nonpositive quasiparticle energy {np.min(R.energies):.3g} at T = {T}")
    n = bose_einstein(R.energies, T)
    Rm = R.R
    G = (Rm * np.concatenate([n, n])) @ Rm.conj().T + (Rm @ Rm.conj().T - np.eye(2 * R.M)) / 2
    return _from_full_hermitized(G, layout)


def covariance_via_coth(H: HamiltonianLike, T: float) -> CovarianceMatrix:
    """G = ½ coth(J H / 2T) J - ½, with coth applied to the eigenvalues of J H (no normalization of eigenvectors)."""
    if not T > 0 or not np.isfinite(T):
        raise ParameterDomainError(f"coth route needs a positive finite temperature, got {T}")
    matrix = _hermitian(H)
    M = matrix.shape[0] // 2
    J = symplectic_form(M)
    scale = max(float(np.linalg.norm(matrix, 2)), np.finfo(float).tiny)
    lam, S = np.linalg.eig(J @ matrix)
    complex_spectrum = np.max(np.abs(lam.imag)) > SPECTRUM_IMAG_TOLERANCE * scale
    if complex_spectrum or np.min(np.abs(lam)) <= SPECTRUM_ZERO_TOLERANCE * scale:
        raise InstabilityError("J H spectrum is not real and nonzero; state not thermalizable")
    coth = 1.0 / np.tanh(lam.real / (2 * T))
    f = np.linalg.solve(S.T, (S * coth).T).T
    G = 0.5 * f @ J - 0.5 * np.eye(2 * M)
    layout = H.layout if isinstance(H, GrandDynamicalMatrix) else None
    return _from_full_hermitized(G, layout)


def marginal_modes(G: CovarianceMatrix, modes: Sequence[int]) -> CovarianceMatrix:
    """Reduced covariance of the listed modes, in the listed order; all of them count as detected modes."""
    idx = list(modes)
    if not idx or min(idx) < 0 or max(idx) >= G.M or len(set(idx)) != len(idx):
        raise ParameterDomainError(f"invalid mode selection {idx} for {G.M} modes")
    block = np.ix_(idx, idx)
    return CovarianceMatrix(G.N[block], G.A[block], ModeLayout(m_ph=len(idx)))


def marginal_photon(G: CovarianceMatrix) -> CovarianceMatrix:
    if G.layout.m_at == 0:
        return G
    return marginal_modes(G, G.layout.photon_modes)


def marginal_atoms(G: CovarianceMatrix) -> CovarianceMatrix:
    if G.layout.m_at == 0:
        raise ParameterDomainError("layout has no atomic modes")
    return marginal_modes(G, G.layout.atom_modes)


def characteristic_function(G: CovarianceMatrix, z: Sequence[complex]) -> complex:
    """Θ(z) = det(1 + G)^{-1/2} det(1 - Z G(1 + G)^{-1})^{-1/2}, Z = diag(z, z), continued from z = (1, ..., 1)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if len(z) != G.M:
        raise ParameterDomainError(f"expected {G.M} arguments, got {len(z)}")
    log_norm, K = correlation_kernel(G)
    norm_K = float(np.linalg.norm(K, 2))
    if np.max(np.abs(z)) * norm_K < 1:
        return complex(np.exp(-0.5 * log_norm - 0.5 * _principal_log_det(K, z[None, :])[0]))
    return complex(np.exp(-0.5 * log_norm - 0.5 * _continued_log_det(K, z)))


def correlation_kernel(G: CovarianceMatrix):
    """Return (log det(1 + G), K = G(1 + G)^{-1}); raises on singular 1 + G."""
    Gf = G.full()
    one_plus = np.eye(len(Gf)) + Gf
    if np.linalg.cond(one_plus) > SINGULARITY_CONDITION:
        raise ParameterDomainError("1 + G is singular")
    _, logdet = np.linalg.slogdet(one_plus)
    K = np.linalg.solve(one_plus, Gf)
    return float(logdet), K


def theta_on_points(G: CovarianceMatrix, zs: np.ndarray) -> np.ndarray:
    """Θ at each row of zs, all strictly inside the region where the principal branch is continuous."""
    log_norm, K = correlation_kernel(G)
    zs = np.asarray(zs, dtype=complex)
    if np.max(np.abs(zs)) * np.linalg.norm(K, 2) >= 1:
        raise ParameterDomainError("points lie outside the convergence region max|z| ||K|| < 1")
    return np.exp(-0.5 * log_norm - 0.5 * _principal_log_det(K, zs))


def single_mode_stats(G_ph: CovarianceMatrix, mode: int) -> SingleModeStats:
    if not 0 <= mode < G_ph.layout.m_ph:
        raise ParameterDomainError(f"mode {mode} outside the {G_ph.layout.m_ph} photon modes")
    eta = float(G_ph.N[mode, mode].real)
    if eta < -HERMITICITY_TOLERANCE:
        raise UnphysicalCovarianceError(f"negative occupation {eta:.3g} in mode {mode}")
    eta = max(eta, 0.0)
    alpha = complex(G_ph.A[mode, mode])
    alpha_c = np.sqrt(eta**2 + eta / 2)
    alpha_max = np.sqrt(eta**2 + eta)
    if abs(alpha) > alpha_max + BOUND_TOLERANCE:
        raise UnphysicalCovarianceError(f"|alpha| = {abs(alpha):.6g} exceeds alpha_max = {alpha_max:.6g}")
    a = min(abs(alpha), alpha_max)
    r_eff = 0.5 * np.arctanh(a / (eta + 0.5))
    q_eff = max(np.sqrt(max((eta + 0.5) ** 2 - a**2, 0.0)) - 0.5, 0.0)
    return SingleModeStats(
        eta=eta, alpha=alpha, alpha_c=float(alpha_c), alpha_max=float(alpha_max), r_eff=float(r_eff), q_eff=float(q_eff)
    )


def photon_number_moments(G: CovarianceMatrix, mode: int) -> PhotonNumberMoments:
    """Moments of b†b in one mode by Wick factorization: ⟨b†b†bb⟩ = 2η² + |α|²."""
    eta = float(G.N[mode, mode].real)
    alpha = abs(G.A[mode, mode])
    factorial_second = 2 * eta**2 + alpha**2
    g2 = factorial_second / eta**2 if eta > 0 else float("inf")
    return PhotonNumberMoments(mean=eta, factorial_second=factorial_second, second=factorial_second + eta, g2=g2)


def _from_full_hermitized(G: np.ndarray, layout: Optional[ModeLayout]) -> CovarianceMatrix:
    G = (G + G.conj().T) / 2
    cov = CovarianceMatrix.from_full(G, layout)
    return CovarianceMatrix(cov.N, (cov.A + cov.A.T) / 2, cov.layout)


def _principal_log_det(K: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Σ log(1 - λ) over eigenvalues λ of diag(z, z) K, one value per row of zs."""
    Z = np.concatenate([zs, zs], axis=1)
    lam = np.linalg.eigvals(Z[:, :, None] * K[None, :, :])
    return np.sum(np.log(1 - lam), axis=1)


def _continued_log_det(K: np.ndarray, z: np.ndarray, max_steps: int = 1 << 16) -> complex:
    """log det(1 - Z K) continued along the straight path from z = (1, ..., 1), refining until every
    step turns the phase by less than π/4."""
    steps = 64
    while steps <= max_steps:
        t = np.linspace(0.0, 1.0, steps + 1)
        path = 1 + t[:, None] * (z[None, :] - 1)
        Z = np.concatenate([path, path], axis=1)
        dets = np.linalg.det(np.eye(len(K))[None] - Z[:, :, None] * K[None])
        if np.any(dets == 0):
            raise ParameterDomainError("characteristic function has a pole on the continuation path")
        turns = np.angle(dets[1:] / dets[:-1])
        if np.max(np.abs(turns)) < np.pi / 4:
            return complex(np.log(np.abs(dets[-1])) + 1j * (np.angle(dets[0]) + np.sum(turns)))
        steps *= 2
    raise ParameterDomainError("phase continuation of the characteristic function did not converge")
