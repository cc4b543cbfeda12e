from .calculation import GaussianModel, calculate_toy_sweep
from .gaussian import CovarianceMatrix, covariance_from_quasiparticles, marginal_photon, single_mode_stats
from .hafnian import hafnian_matching, hafnian_repeated, hafnian_trace, pattern_probability
from .model import GrandDynamicalMatrix, ModeLayout, ToyParams, assemble_grand_matrix, build_toy_hamiltonian
from .occupation_distrib import ProbabilityTable
from .sampler import draw_samples, enumerate_distribution
from .symplectic import BogoliubovTransform, bloch_messiah, solve_bdg
