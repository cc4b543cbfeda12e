"""Ingestion of run configurations, overlap grids, covariance matrices, hafnian matrices and probability tables."""
import csv
import json
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np
from pydantic import ValidationError, parse_obj_as

from hybridgbs.api.v1.common import complex_array
from hybridgbs.api.v1.gbs_data import CovarianceData, HafnianMatrixData, OverlapGridData
from hybridgbs.api.v1.run_config import RunConfig
from hybridgbs.kernel.errors import ConfigurationError, IngestionError
from hybridgbs.kernel.gaussian import CovarianceMatrix
from hybridgbs.kernel.model import ModeLayout, OverlapGrid
from hybridgbs.kernel.occupation_distrib import ProbabilityTable

PathLike = Union[str, Path]


class OverlapGridFile(NamedTuple):
    grid: OverlapGrid
    V_tr: np.ndarray
    n_ex: np.ndarray


def read_run_config(path: PathLike) -> RunConfig:
    """Parse a JSON run configuration.

    Raises:
        ConfigurationError: file is not JSON or violates the configuration schema.
    """
    try:
        return RunConfig.parse_obj(_load_json(path))
    except (IngestionError, ValidationError) as e:
        raise ConfigurationError(f"invalid run configuration {path}: {e}") from e


def read_overlap_grid(path: PathLike) -> OverlapGridFile:
    data = _parse(OverlapGridData, path)
    n = len(data.weights)
    try:
        f = _profiles(data.f, n)
        laplacian_f = None if data.laplacian_f is None else _profiles(data.laplacian_f, n)
        grid = OverlapGrid(
            points=data.points,
            weights=data.weights,
            phi0=complex_array(data.phi0, 1),
            f=f,
            omega=complex_array(data.omega, 1),
            g=_profiles(data.g, n),
            laplacian_f=laplacian_f,
            check_normalization=data.check_normalization,
        )
    except ValueError as e:
        if isinstance(e, IngestionError):
            raise
        raise IngestionError(f"malformed overlap grid {path}: {e}") from e
    V_tr = np.zeros(n) if data.v_tr is None else np.asarray(data.v_tr, dtype=float)
    n_ex = np.zeros(n) if data.n_ex is None else np.asarray(data.n_ex, dtype=float)
    return OverlapGridFile(grid, V_tr, n_ex)


def read_covariance(path: PathLike) -> CovarianceMatrix:
    """Covariance from JSON; the result is not checked for physicality (see CovarianceMatrix.validate)."""
    data = _parse(CovarianceData, path)
    layout = ModeLayout(m_ph=data.m_ph, m_at=data.m_at)
    try:
        N = complex_array(data.N, 2, square=True)
        A = complex_array(data.A, 2, square=True)
    except ValueError as e:
        raise IngestionError(f"malformed covariance {path}: {e}") from e
    if N.shape != (layout.M, layout.M) or A.shape != (layout.M, layout.M):
        raise IngestionError(f"covariance blocks must be {layout.M}x{layout.M}, got {N.shape} and {A.shape}")
    return CovarianceMatrix(N, A, layout)


def read_hafnian_matrix(path: PathLike) -> np.ndarray:
    data = _parse(HafnianMatrixData, path)
    if data.n == 0:
        return np.zeros((0, 0), dtype=complex)
    try:
        matrix = complex_array(data.entries, 2, square=True)
    except ValueError as e:
        raise IngestionError(f"malformed hafnian matrix {path}: {e}") from e
    if matrix.shape != (data.n, data.n):
        raise IngestionError(f"expected a {data.n}x{data.n} matrix, got {matrix.shape}")
    return matrix


def read_probability_table(path: PathLike) -> ProbabilityTable:
    """Read a table written by the probs mode; the cutoff is the largest total count present."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        raise IngestionError(f"probability table {path} has no entries")
    header, body = rows[0], rows[1:]
    if header[-1] != "probability" or len(header) < 2:
        raise IngestionError(f"unexpected probability table header {header}")
    try:
        patterns = [tuple(int(k) for k in row[:-1]) for row in body if row]
        probabilities = [float(row[-1]) for row in body if row]
    except ValueError as e:
        raise IngestionError(f"malformed probability table {path}: {e}") from e
    return ProbabilityTable(patterns, probabilities, max(sum(p) for p in patterns))


def _load_json(path: PathLike):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise IngestionError(f"{path} is not valid JSON: {e}") from e


def _parse(model, path: PathLike):
    try:
        return parse_obj_as(model, _load_json(path))
    except ValidationError as e:
        raise IngestionError(f"malformed {model.__name__} in {path}: {e}") from e


def _profiles(profiles, n: int) -> np.ndarray:
    if not profiles:
        return np.zeros((0, n), dtype=complex)
    return np.stack([complex_array(p, 1) for p in profiles])
