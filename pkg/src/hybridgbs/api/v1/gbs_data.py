"""Schemas of the JSON input files: covariance matrices, hafnian matrices and overlap grids."""
from typing import List, Optional

from pydantic import BaseModel, Field, validator

from hybridgbs.api.v1.common import ComplexEntries


class CovarianceData(BaseModel):
    """Covariance matrix of a zero-mean Gaussian state, photon modes first."""

    m_ph: int = Field(ge=1, description="Number of photon modes.")
    m_at: int = Field(0, ge=0, description="Number of atomic modes.")
    N: ComplexEntries = Field(description="Normal correlators ⟨b†_j b_k⟩, nested rows or flat row-major.")
    A: ComplexEntries = Field(description="Anomalous correlators ⟨b_j b_k⟩, nested rows or flat row-major.")


class HafnianMatrixData(BaseModel):
    """Symmetric complex matrix, entries row-major."""

    n: int = Field(ge=0, description="Matrix dimension.")
    entries: ComplexEntries

    @validator("entries")
    def entry_count(cls, v, values):
        n = values.get("n")
        if n is not None and len(v) not in (n, n * n):
            raise ValueError(f"expected {n * n} entries (or {n} rows) for n = {n}, got {len(v)}")
        return v


class OverlapGridData(BaseModel):
    """Quadrature grid with sampled mode profiles; complex samples as [re, im] pairs."""

    points: List[List[float]] = Field(description="Grid points (x, y, z).")
    weights: List[float] = Field(description="Quadrature weights.")
    phi0: ComplexEntries = Field(description="Condensate wavefunction on the grid.")
    f: List[ComplexEntries] = Field(default_factory=list, description="Excited atomic profiles, one per atomic mode.")
    omega: ComplexEntries = Field(description="Pump mode profile on the grid.")
    g: List[ComplexEntries] = Field(default_factory=list, description="Cavity mode profiles, one per photon mode.")
    laplacian_f: Optional[List[ComplexEntries]] = Field(None, description="Laplacian of each excited profile.")
    v_tr: Optional[List[float]] = Field(None, description="Trap potential on the grid.")
    n_ex: Optional[List[float]] = Field(None, description="Thermal atom density on the grid.")
    check_normalization: bool = Field(True, description="Require normalized and orthogonal profiles.")
