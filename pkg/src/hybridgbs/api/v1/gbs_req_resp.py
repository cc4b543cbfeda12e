from typing import List, Optional

from pydantic import BaseModel, Field

from hybridgbs.api.v1.common import CheckResult

# region Response


class SweepRow(BaseModel):
    """Photon statistics at one sweep point; every statistic is absent for a failed (unstable) point."""

    sweep_value: float
    eta: Optional[float] = Field(None, description="Normal correlator ⟨a†a⟩.")
    alpha_abs: Optional[float] = Field(None, description="Magnitude of the anomalous correlator ⟨aa⟩.")
    alpha_c: Optional[float] = Field(None, description="Characteristic anomalous correlator √(η² + η/2).")
    alpha_max: Optional[float] = Field(None, description="Maximal anomalous correlator √(η² + η).")
    r_eff: Optional[float] = Field(None, description="Effective squeezing parameter.")
    q_eff: Optional[float] = Field(None, description="Effective thermal occupation.")
    error: Optional[str] = Field(None, description="Reason the point failed.")


class ToySweepResponse(BaseModel):
    variable: str = Field(description="'gamma' or 'T'.")
    rows: List[SweepRow]


class ProbabilitiesResponse(BaseModel):
    """Enumerated occupation-pattern distribution, lexicographic order."""

    cutoff: int
    patterns: List[List[int]]
    probabilities: List[float]
    total: float


class SamplesResponse(BaseModel):
    seed: int
    samples: List[List[int]]


class HafnianResponse(BaseModel):
    n: int
    real: float
    imag: float


class ValidationReport(BaseModel):
    """Outcome of every validation check; passed is false when any check failed."""

    passed: bool
    checks: List[CheckResult] = Field([], description="Checks in execution order.")


# endregion
