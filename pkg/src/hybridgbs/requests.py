import importlib.resources
import json
import logging

import numpy as np

import hybridgbs.data.static.example_configs
from hybridgbs.api.v1.common import CalcSettings, CheckResult
from hybridgbs.api.v1.gbs_req_resp import (
    HafnianResponse,
    ProbabilitiesResponse,
    SamplesResponse,
    SweepRow,
    ToySweepResponse,
    ValidationReport,
)
from hybridgbs.api.v1.run_config import RunConfig

from .data.readers import read_covariance, read_hafnian_matrix, read_overlap_grid, read_probability_table
from .kernel import calculation as calc
from .kernel.errors import ConfigurationError
from .kernel.gaussian import CovarianceMatrix, marginal_photon
from .kernel.hafnian import hafnian_trace
from .kernel.model import (
    GrandDynamicalMatrix,
    ModeLayout,
    assemble_grand_matrix,
    blocks_from_overlaps,
    build_toy_hamiltonian,
)
from .kernel.sampler import draw_samples, enumerate_distribution
from .kernel.validation import ValidationSettings, Validator


class Requester:
    def __init__(self, settings: CalcSettings):
        self.settings = settings

    def get(self, *, request_id, request_dict):
        if request_id == "run_toy_sweep":
            return dumps(run_toy_sweep(_config(request_dict, "toy-sweep"), self.settings).dict())
        elif request_id == "get_probabilities":
            return dumps(run_probs(_config(request_dict, "probs"), self.settings).dict())
        elif request_id == "get_samples":
            return dumps(run_sample(_config(request_dict, "sample"), self.settings).dict())
        elif request_id == "get_hafnian":
            return dumps(run_hafnian(_config(request_dict, "hafnian"), self.settings).dict())
        elif request_id == "run_validate":
            return dumps(run_validate(_config(request_dict, "validate"), self.settings).dict())
        elif request_id == "get_example_configs":
            return dumps({name: cfg.dict(by_alias=True) for name, cfg in _get_example_configs().items()})
        else:
            raise ValueError(f"request type '{request_id}' not found")


class NumpyArrayEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.generic):
            return obj.item()
        return json.JSONEncoder.default(self, obj)


def dumps(dict):
    return json.dumps(dict, cls=NumpyArrayEncoder)


def run_toy_sweep(cfg: RunConfig, settings: CalcSettings) -> ToySweepResponse:
    start, stop = cfg.sweep.bounds()
    values = calc.sweep_values(start, stop, cfg.sweep.points, cfg.sweep.log_scale)
    points = calc.calculate_toy_sweep(
        cfg.toy.to_params(), cfg.T_eff, cfg.sweep.variable, values, workers=_workers(cfg, settings)
    )
    rows = []
    for point in points:
        s = point.stats
        if s is not None:
            rows.append(
                SweepRow(
                    sweep_value=point.value,
                    eta=s.eta,
                    alpha_abs=s.alpha_abs,
                    alpha_c=s.alpha_c,
                    alpha_max=s.alpha_max,
                    r_eff=s.r_eff,
                    q_eff=s.q_eff,
                )
            )
        else:
            rows.append(SweepRow(sweep_value=point.value, error=point.error))
    failed = sum(1 for p in points if not p.ok)
    logging.info("toy sweep done: %d points, %d failed", len(points), failed)
    return ToySweepResponse(variable=cfg.sweep.variable, rows=rows)


def run_probs(cfg: RunConfig, settings: CalcSettings) -> ProbabilitiesResponse:
    table = enumerate_distribution(
        measured_covariance(cfg), cfg.cutoff, engine=cfg.engine, workers=_workers(cfg, settings)
    )
    if table.deficit > 1e-6:
        logging.warning("probabilities up to cutoff %d sum to %.9g; raise the cutoff", cfg.cutoff, table.total)
    return ProbabilitiesResponse(
        cutoff=table.cutoff,
        patterns=[list(p) for p in table.patterns],
        probabilities=table.probabilities.tolist(),
        total=table.total,
    )


def run_sample(cfg: RunConfig, settings: CalcSettings) -> SamplesResponse:
    table = enumerate_distribution(
        measured_covariance(cfg), cfg.cutoff, engine=cfg.engine, workers=_workers(cfg, settings)
    )
    samples = draw_samples(table, cfg.seed, cfg.count)
    return SamplesResponse(seed=cfg.seed, samples=[list(s) for s in samples])


def run_hafnian(cfg: RunConfig, settings: CalcSettings) -> HafnianResponse:
    if cfg.hafnian_path is None:
        raise ConfigurationError("hafnian mode needs hafnian_path")
    matrix = read_hafnian_matrix(cfg.hafnian_path)
    value = hafnian_trace(matrix, workers=_workers(cfg, settings))
    return HafnianResponse(n=matrix.shape[0], real=value.real, imag=value.imag)


def run_validate(cfg: RunConfig, settings: CalcSettings) -> ValidationReport:
    validator = Validator(_validation_settings(cfg, settings))
    if cfg.covariance_path is not None:
        G = read_covariance(cfg.covariance_path)
        validator.validate_covariance(G, "input_covariance_physicality", series_route=True)
    else:
        model = build_model(cfg)
        validator.validate_model(model, toy=None if cfg.grid_path else cfg.toy.to_params())
        G = model.covariance
    if cfg.probabilities_path is not None:
        validator.validate_table(G, read_probability_table(cfg.probabilities_path))
    checks = [
        CheckResult(name=r.name, residual=r.residual, tolerance=r.tolerance, status=r.status, detail=r.detail)
        for r in validator.results
    ]
    return ValidationReport(passed=validator.passed, checks=checks)


def build_hamiltonian(cfg: RunConfig) -> GrandDynamicalMatrix:
    """Toy Hamiltonian, or the overlap-grid model when a grid file is configured."""
    if cfg.grid_path is None:
        return build_toy_hamiltonian(cfg.toy.to_params())
    if cfg.physical is None:
        raise ConfigurationError("grid_path needs the physical parameters")
    grid_file = read_overlap_grid(cfg.grid_path)
    inputs = cfg.physical.to_inputs(grid_file.V_tr, grid_file.n_ex)
    layout = ModeLayout(m_ph=grid_file.grid.g.shape[0], m_at=grid_file.grid.f.shape[0])
    return assemble_grand_matrix(blocks_from_overlaps(inputs, grid_file.grid, layout), layout)


def build_model(cfg: RunConfig) -> calc.GaussianModel:
    return calc.GaussianModel(build_hamiltonian(cfg), cfg.T_eff)


def measured_covariance(cfg: RunConfig) -> CovarianceMatrix:
    """Covariance of the measured modes: photon marginal, or every mode when modes is 'all'."""
    if cfg.covariance_path is not None:
        G = read_covariance(cfg.covariance_path)
    else:
        G = build_model(cfg).covariance
    return G if cfg.modes == "all" else marginal_photon(G)


def _config(request_dict: dict, mode: str) -> RunConfig:
    return RunConfig(**{**request_dict, "mode": mode})


def _workers(cfg: RunConfig, settings: CalcSettings) -> int:
    return settings.workers if cfg.workers is None else cfg.workers


def _validation_settings(cfg: RunConfig, settings: CalcSettings) -> ValidationSettings:
    return ValidationSettings(
        cutoff=cfg.cutoff,
        seed=cfg.seed,
        series_radius=settings.series_radius,
        fock_start_cutoff=settings.fock_start_cutoff,
        fock_cutoff_step=settings.fock_cutoff_step,
        fock_max_cutoff=settings.fock_max_cutoff,
        drift_tolerance=settings.drift_tolerance,
        leakage_tolerance=settings.leakage_tolerance,
        engine=cfg.engine,
        workers=_workers(cfg, settings),
    )


def _get_example_configs() -> dict:
    configs = {}
    for file in sorted(importlib.resources.contents(hybridgbs.data.static.example_configs)):
        if not str(file).endswith(".json"):
            continue
        with importlib.resources.open_text(hybridgbs.data.static.example_configs, file) as f:
            configs[str(file)[: -len(".json")]] = RunConfig(**json.load(f))
    return configs
