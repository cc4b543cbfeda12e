"""Error types raised by the hybridgbs kernel.

All errors derive from ValueError so that callers treating bad input as a value problem keep working.
"""


class HybridGbsError(ValueError):
    pass


class ParameterDomainError(HybridGbsError):
    """Input outside the domain of an operation (bad parameters, non-Hermitian H, singular 1 + G)."""


class IngestionError(HybridGbsError):
    """Ingested arrays or payloads are malformed or inconsistent."""


class AssemblyError(HybridGbsError):
    """Hamiltonian blocks have dimensions inconsistent with the mode layout."""


class InstabilityError(ParameterDomainError):
    """The spectrum of J H is not real and bounded away from zero: the state cannot be thermalized."""


class DivergentOccupationError(HybridGbsError):
    pass


class UnphysicalCovarianceError(HybridGbsError):
    """Correlators violate positivity or the bound |A_jj|^2 <= N_jj (N_jj + 1)."""


class SizeGuardError(HybridGbsError):
    """Problem size exceeds a desk-scale guard."""


class HafnianSizeError(SizeGuardError):
    pass


class NumericalConsistencyError(HybridGbsError):
    """A quantity that must be real and nonnegative came out otherwise beyond tolerance."""


class CutoffError(HybridGbsError):
    pass


class PrecisionError(HybridGbsError):
    pass


class RunError(HybridGbsError):
    pass


class ConfigurationError(HybridGbsError):
    pass
