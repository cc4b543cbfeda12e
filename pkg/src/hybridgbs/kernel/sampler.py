"""Exact sampling of occupation patterns from an enumerated distribution."""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence

import numpy as np

from .errors import ParameterDomainError, PrecisionError, SizeGuardError
from .gaussian import CovarianceMatrix
from .hafnian import build_C, pattern_probability
from .occupation_distrib import OccupationPattern, ProbabilityTable

# ceiling on the total count per number of modes
MAX_TOTAL_CUTOFF: Dict[int, int] = {1: 64, 2: 32, 3: 20, 4: 16}
MAX_SAMPLING_DEFICIT = 0.01


def patterns_up_to(modes: int, total_cutoff: int) -> List[OccupationPattern]:
    """All patterns over the given number of modes with Σn ≤ total_cutoff, lexicographic."""
    return [n for n in itertools.product(range(total_cutoff + 1), repeat=modes) if sum(n) <= total_cutoff]


def enumerate_distribution(
    G_ph: CovarianceMatrix, total_cutoff: int, engine: str = "auto", workers: int = 1
) -> ProbabilityTable:
    m = G_ph.M
    if total_cutoff < 0:
        raise ParameterDomainError(f"cutoff must be nonnegative, got {total_cutoff}")
    if m not in MAX_TOTAL_CUTOFF:
        raise SizeGuardError(f"enumeration limited to {max(MAX_TOTAL_CUTOFF)} modes, got {m}")
    if total_cutoff > MAX_TOTAL_CUTOFF[m]:
        raise SizeGuardError(f"enumeration over {m} modes limited to cutoff {MAX_TOTAL_CUTOFF[m]}, got {total_cutoff}")
    patterns = patterns_up_to(m, total_cutoff)
    C = build_C(G_ph)
    logging.info("enumerating %d patterns over %d modes", len(patterns), m)

    def probability(n: OccupationPattern) -> float:
        return pattern_probability(G_ph, n, engine=engine, C=C)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            probabilities = list(executor.map(probability, patterns))
    else:
        probabilities = [probability(n) for n in patterns]
    return ProbabilityTable(patterns, probabilities, total_cutoff)


def draw_samples(table: ProbabilityTable, seed: int, count: int) -> List[OccupationPattern]:
    """Inverse-CDF sampling over the renormalized table with a counter-based (Philox) generator."""
    if table.deficit >= MAX_SAMPLING_DEFICIT:
        raise PrecisionError(f"table deficit {table.deficit:.3g} too large to sample from; raise the cutoff")
    if count < 0:
        raise ParameterDomainError(f"sample count must be nonnegative, got {count}")
    if seed < 0:
        raise ParameterDomainError(f"seed must be nonnegative, got {seed}")
    rng = np.random.Generator(np.random.Philox(seed))
    cdf = np.cumsum(table.probabilities)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(count), side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    patterns = table.patterns
    return [patterns[i] for i in idx]


def empirical_frequencies(samples: Sequence[Sequence[int]], table: ProbabilityTable) -> np.ndarray:
    """Fraction of samples equal to each table pattern, in table order."""
    counts = np.zeros(len(table.patterns))
    index = {p: i for i, p in enumerate(table.patterns)}
    for s in samples:
        counts[index[tuple(s)]] += 1
    return counts / max(len(samples), 1)
