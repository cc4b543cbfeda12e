import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import HybridGbsError, ParameterDomainError, RunError
from .gaussian import (
    CovarianceMatrix,
    SingleModeStats,
    covariance_from_quasiparticles,
    marginal_photon,
    single_mode_stats,
)
from .model import GrandDynamicalMatrix, ToyParams, build_toy_hamiltonian
from .symplectic import BogoliubovTransform, solve_bdg

SWEEP_VARIABLES = ("gamma", "T")


class GaussianModel:
    """Hamiltonian, its Bogoliubov transform and the resulting thermal covariance."""

    def __init__(self, H: GrandDynamicalMatrix, T: float):
        self.H = H
        self.T = T
        self.transform: BogoliubovTransform = solve_bdg(H)
        self.covariance: CovarianceMatrix = covariance_from_quasiparticles(self.transform, T, H.layout)

    @property
    def photon_covariance(self) -> CovarianceMatrix:
        return marginal_photon(self.covariance)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    stats: Optional[SingleModeStats] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.stats is not None


def sweep_values(start: float, stop: float, points: int, log_scale: bool) -> np.ndarray:
    if points < 2 or not start < stop:
        raise ParameterDomainError(f"sweep needs points >= 2 and start < stop, got {points} on [{start}, {stop}]")
    if log_scale:
        if start <= 0:
            raise ParameterDomainError(f"log-scaled sweep needs a positive start, got {start}")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def toy_photon_stats(params: ToyParams, T: float) -> SingleModeStats:
    """η, α and derived diagnostics of the toy photon mode through model → symplectic → gaussian."""
    model = GaussianModel(build_toy_hamiltonian(params), T)
    return single_mode_stats(model.photon_covariance, 0)


def calculate_toy_sweep(
    params: ToyParams, T: float, variable: str, values: Sequence[float], workers: int = 1
) -> List[SweepPoint]:
    """Evaluate the toy photon statistics at every sweep value; rows keep sweep order.

    Points that fail (unstable, divergent or unphysical) are returned as failed rows; a sweep in which every point
    fails raises RunError.
    """
    if variable not in SWEEP_VARIABLES:
        raise ParameterDomainError(f"sweep variable must be one of {SWEEP_VARIABLES}, got '{variable}'")

    def evaluate(value: float) -> SweepPoint:
        try:
            if variable == "gamma":
                stats = toy_photon_stats(replace(params, gamma=float(value)), T)
            else:
                stats = toy_photon_stats(params, float(value))
            return SweepPoint(float(value), stats)
        except HybridGbsError as e:
            logging.warning("sweep point %s=%g failed: %s", variable, value, e)
            return SweepPoint(float(value), error=str(e))

    logging.info("toy sweep over %s: %d points, %d workers", variable, len(values), workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            points = list(executor.map(evaluate, values))
    else:
        points = [evaluate(v) for v in values]
    if not any(p.ok for p in points):
        raise RunError(f"all {len(points)} sweep points failed; first error: {points[0].error}")
    return points
