from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, root_validator, validator

from hybridgbs.kernel.model import PhysicalInputs, ToyParams

# default sweep ranges, in units of ε
DEFAULT_SWEEP_BOUNDS = {"gamma": (0.01, 30.0), "T": (0.01, 2.0)}


class ToyConfig(BaseModel):
    """Toy model; energies are ratios to the atomic energy ε."""

    hbar_omega: float = Field(2.0, description="Photon energy ℏω.")
    epsilon: float = Field(1.0, description="Atomic excitation energy ε (the energy unit).")
    gamma: float = Field(0.5, description="Photon-atom coupling γ, shared by all coupling terms.")
    N0: float = Field(1.0, description="Condensate occupation N0 (only the ratio Q0/N0 enters).")
    Q0: float = Field(7.0, description="Pump-mode occupation Q0.")
    atom_modes: int = Field(1, ge=1, description="Number of identical atomic modes coupled to the photon mode.")
    atom_counter_rotating: float = Field(0.0, description="Atom-atom counter-rotating coupling (A A + h.c.).")

    def to_params(self) -> ToyParams:
        return ToyParams(**self.dict())


class SweepConfig(BaseModel):
    variable: Literal["gamma", "T"] = Field("gamma", description="Swept quantity: coupling γ or temperature T_eff.")
    from_: Optional[float] = Field(None, alias="from", description="First sweep value; default depends on variable.")
    to: Optional[float] = Field(None, description="Last sweep value; default depends on variable.")
    points: int = Field(60, description="Number of sweep points.")
    log_scale: bool = Field(True, description="Geometric instead of linear spacing.")

    class Config:
        allow_population_by_field_name = True

    @validator("points")
    def enough_points(cls, v):
        if v < 2:
            raise ValueError(f"sweep needs at least 2 points, got {v}")
        return v

    @root_validator(skip_on_failure=True)
    def ordered_bounds(cls, values):
        start, stop = _bounds(values["variable"], values.get("from_"), values.get("to"))
        if not start < stop:
            raise ValueError(f"sweep needs from < to, got from={start}, to={stop}")
        if values.get("log_scale") and start <= 0:
            raise ValueError(f"log-scaled sweep needs a positive start, got {start}")
        return values

    def bounds(self) -> Tuple[float, float]:
        return _bounds(self.variable, self.from_, self.to)


class PhysicalConfig(BaseModel):
    """Scalar parameters of the cavity-QED Hamiltonian; sampled profiles come from the overlap-grid file."""

    Delta_a: float = Field(description="Atom-pump detuning Δ_a.")
    N0: float = Field(description="Condensate occupation.")
    Q0: float = Field(description="Pump-mode occupation.")
    g_a: float = Field(description="Contact interaction strength.")
    mu: float = Field(description="Chemical potential.")
    mass: float = Field(description="Atomic mass.")
    hbar: float = Field(1.0, description="Reduced Planck constant in the declared unit system.")
    photon_energies: Optional[List[float]] = Field(
        None, description="Rotating-frame photon energies ℏω_ν - ℏΔ_ν, one per quantum mode; zeros when omitted."
    )
    V_tr: Optional[List[float]] = Field(None, description="Trap potential on the grid; overrides the grid file.")
    n_ex: Optional[List[float]] = Field(None, description="Thermal atom density; overrides the grid file.")

    def to_inputs(self, V_tr, n_ex) -> PhysicalInputs:
        return PhysicalInputs(
            Delta_a=self.Delta_a,
            N0=self.N0,
            Q0=self.Q0,
            g_a=self.g_a,
            mu=self.mu,
            mass=self.mass,
            V_tr=V_tr if self.V_tr is None else self.V_tr,
            n_ex=n_ex if self.n_ex is None else self.n_ex,
            hbar=self.hbar,
            photon_energies=self.photon_energies,
        )


class RunConfig(BaseModel):
    """Configuration of a single command-line run."""

    mode: Literal["toy-sweep", "probs", "sample", "hafnian", "validate"] = Field("toy-sweep")
    toy: ToyConfig = Field(default_factory=ToyConfig)
    T_eff: float = Field(0.0, ge=0, description="Effective temperature, in units of ε.")
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    cutoff: int = Field(10, ge=0, description="Bound on the total count of enumerated patterns.")
    seed: int = Field(42, ge=0, description="Seed of the counter-based sample generator.")
    count: int = Field(1000, ge=0, description="Number of samples to draw.")
    output_path: Optional[str] = Field(None, description="Output file; standard output when omitted.")
    modes: Literal["photon", "all"] = Field(
        "photon", description="Measured modes: photon modes only, or photon and atomic modes jointly."
    )
    engine: Literal["auto", "repeated", "trace", "matching"] = Field("auto", description="Hafnian engine.")
    workers: Optional[int] = Field(None, ge=1, description="Worker threads; the configured default when omitted.")
    hafnian_path: Optional[str] = Field(None, description="JSON matrix evaluated by the hafnian mode.")
    grid_path: Optional[str] = Field(None, description="Overlap-grid JSON; replaces the toy model when given.")
    physical: Optional[PhysicalConfig] = Field(None, description="Scalar parameters used with grid_path.")
    covariance_path: Optional[str] = Field(None, description="Covariance JSON; replaces the model pipeline.")
    probabilities_path: Optional[str] = Field(None, description="Probability CSV re-checked by validate.")

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def consistent_inputs(cls, values):
        if values["mode"] == "hafnian" and not values.get("hafnian_path"):
            raise ValueError("hafnian mode needs hafnian_path")
        if values.get("grid_path") and values.get("physical") is None:
            raise ValueError("grid_path needs the physical parameters")
        return values


def _bounds(variable: str, start: Optional[float], stop: Optional[float]) -> Tuple[float, float]:
    default_start, default_stop = DEFAULT_SWEEP_BOUNDS[variable]
    return (default_start if start is None else start), (default_stop if stop is None else stop)
