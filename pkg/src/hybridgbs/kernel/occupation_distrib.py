from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import NumericalConsistencyError, ParameterDomainError

OccupationPattern = Tuple[int, ...]

NORMALIZATION_TOLERANCE = 1e-9


class ProbabilityTable:
    """Occupation patterns with their probabilities, all patterns with Σn ≤ cutoff, sorted lexicographically."""

    __slots__ = ["__patterns", "__probabilities", "__cutoff", "__index"]

    def __init__(self, patterns: Iterable[Sequence[int]], probabilities: Iterable[float], cutoff: int):
        """Create a new table.
        Args:
            patterns: occupation patterns, one count per mode.
            probabilities: probability of each pattern.
            cutoff: bound on the total count of the enumerated patterns.
        """
        entries = sorted(zip((tuple(int(k) for k in p) for p in patterns), (float(q) for q in probabilities)))
        if not entries:
            raise ParameterDomainError("probability table needs at least one pattern")
        widths = {len(p) for p, _ in entries}
        if len(widths) != 1:
            raise ParameterDomainError(f"patterns have inconsistent lengths {sorted(widths)}")
        self.__patterns: List[OccupationPattern] = [p for p, _ in entries]
        self.__probabilities = np.array([q for _, q in entries])
        if np.any(self.__probabilities < 0) or not np.all(np.isfinite(self.__probabilities)):
            raise NumericalConsistencyError("probabilities must be finite and nonnegative")
        if 1 - self.__probabilities.sum() < -NORMALIZATION_TOLERANCE:
            raise NumericalConsistencyError(f"probabilities sum to {self.__probabilities.sum()!r} > 1")
        self.__cutoff = int(cutoff)
        self.__index: Dict[OccupationPattern, int] = {p: i for i, p in enumerate(self.__patterns)}
        if len(self.__index) != len(self.__patterns):
            raise ParameterDomainError("duplicate patterns in probability table")

    @property
    def patterns(self) -> List[OccupationPattern]:
        return self.__patterns

    @property
    def probabilities(self) -> np.ndarray:
        return self.__probabilities

    @property
    def entries(self) -> List[Tuple[OccupationPattern, float]]:
        return list(zip(self.__patterns, self.__probabilities.tolist()))

    @property
    def cutoff(self) -> int:
        return self.__cutoff

    @property
    def modes(self) -> int:
        return len(self.__patterns[0])

    @property
    def total(self) -> float:
        return float(self.__probabilities.sum())

    @property
    def deficit(self) -> float:
        """1 - Σp, floored at zero (a sum marginally above one is rounding)."""
        return max(0.0, 1.0 - self.total)

    def probability(self, pattern: Sequence[int]) -> float:
        i = self.__index.get(tuple(int(k) for k in pattern))
        return 0.0 if i is None else float(self.__probabilities[i])

    def max_abs_difference(self, other: "ProbabilityTable") -> float:
        """Largest per-pattern difference over the union of both pattern sets."""
        union = set(self.__patterns) | set(other.patterns)
        return max(abs(self.probability(p) - other.probability(p)) for p in union)
