from .kernel import (
    CovarianceMatrix,
    GrandDynamicalMatrix,
    ProbabilityTable,
    ToyParams,
    build_toy_hamiltonian,
    covariance_from_quasiparticles,
    enumerate_distribution,
    solve_bdg,
)
