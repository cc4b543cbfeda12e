import math
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

# complex numbers travel as [re, im] pairs, real numbers as plain numbers
ComplexEntries = List[Union[float, List[Any]]]


class CalcSettings(BaseModel):
    """Numerical settings shared by all runs; defaults may be overridden from the environment."""

    workers: int = Field(1, ge=1, description="Threads used for sweeps, enumeration and the trace engine.")
    series_radius: float = Field(0.5, gt=0, lt=1, description="Polydisc radius of the series oracle.")
    fock_start_cutoff: int = Field(8, ge=1, description="First per-mode cutoff of the Fock oracle.")
    fock_cutoff_step: int = Field(4, ge=1, description="Cutoff increment while the Fock oracle escalates.")
    fock_max_cutoff: int = Field(16, ge=1, description="Largest per-mode cutoff the Fock oracle may reach.")
    drift_tolerance: float = Field(1e-8, gt=0, description="Accepted change of the Fock number distribution.")
    leakage_tolerance: float = Field(1e-8, gt=0, description="Accepted population at the Fock cutoff.")


class CheckResult(BaseModel):
    """Outcome of a single validation check."""

    name: str
    residual: Optional[float] = Field(None, description="Measured residual; absent when the check did not run.")
    tolerance: float
    status: str = Field(description="'pass', 'fail' or 'skipped'.")
    detail: str = Field("", description="Reason for a skip or an error message.")


def complex_array(value: Any, ndim: int, square: bool = False) -> np.ndarray:
    """Array of the given rank from numbers or [re, im] pairs.

    With square=True a matrix may also be given as a flat row-major list of n² entries.
    """
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValueError(f"malformed numeric array: {e}") from e
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
        flat_pairs = False
    else:
        flat_pairs = square and arr.ndim == 2 and arr.shape[1] == 2 and arr.shape[0] != 2
    if flat_pairs:
        arr = arr[:, 0] + 1j * arr[:, 1]
    if square and arr.ndim == 1:
        n = math.isqrt(arr.size)
        if n * n != arr.size:
            raise ValueError(f"flat matrix needs a square number of entries, got {arr.size}")
        arr = arr.reshape(n, n)
    if arr.ndim != ndim or (square and arr.shape[0] != arr.shape[1]):
        raise ValueError(f"expected a rank-{ndim} array of numbers or [re, im] pairs, got shape {arr.shape}")
    return np.asarray(arr, dtype=complex)


def complex_entries(arr: np.ndarray) -> list:
    """Nested [re, im] pairs for JSON output."""
    a = np.asarray(arr, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()
