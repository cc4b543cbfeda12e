"""Loop-free hafnians and hafnian-based occupation probabilities of Gaussian states.

Three engines are provided: perfect-matching recursion (reference), inclusion-exclusion over pair subsets with
power traces, and a finite-difference expansion for matrices with repeated rows and columns, which never
materializes the repeated matrix.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import HafnianSizeError, NumericalConsistencyError, ParameterDomainError
from .gaussian import CovarianceMatrix, correlation_kernel
from .occupation_distrib import OccupationPattern

MATCHING_LIMIT = 20
TRACE_LIMIT = 36
REPEATED_TERM_LIMIT = 50_000_000
REPEATED_RELATIVE_TOLERANCE = 1e-12
LOG_FORM_ORDER = 24
SYMMETRY_TOLERANCE = 1e-12
PROBABILITY_TOLERANCE = 1e-9
TRACE_CHUNK = 1024
GRID_CHUNK = 65536


def hafnian_matching(matrix: np.ndarray) -> complex:
    """Sum over perfect matchings of Π M_ij, always pairing the lowest unmatched index."""
    A = _symmetric(matrix, MATCHING_LIMIT)
    n = A.shape[0]
    if n % 2:
        return 0j
    if n == 0:
        return 1 + 0j
    entries = A.tolist()

    @lru_cache(maxsize=None)
    def _haf(mask: int) -> complex:
        if mask == 0:
            return 1 + 0j
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = 0j
        row = entries[i]
        bits = rest
        while bits:
            low = bits & -bits
            j = low.bit_length() - 1
            total += row[j] * _haf(rest & ~low)
            bits &= ~low
        return total

    return complex(_haf((1 << n) - 1))


def hafnian_trace(matrix: np.ndarray, workers: int = 1) -> complex:
    """Hafnian by inclusion-exclusion over subsets S of index pairs:

    haf(A) = Σ_S (-1)^{m-|S|} [x^m] exp(Σ_k tr((X A)_S^k) x^k / 2k),  n = 2m,

    where X swaps the members of each pair (2i, 2i+1). Subsets are processed in fixed chunks (size order, then
    lexicographic) and chunk sums are reduced in that order, so the result does not depend on the worker count.
    """
    A = _symmetric(matrix, TRACE_LIMIT)
    n = A.shape[0]
    if n % 2:
        return 0j
    if n == 0:
        return 1 + 0j
    m = n // 2
    A = A.copy()
    np.fill_diagonal(A, 0)
    scale = np.sum(np.abs(A)) / n**2 / np.sqrt(2.0)
    if scale == 0:
        return 0j
    B = (A / scale)[_pair_swap(m)]

    chunks = list(_subset_chunks(m))
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partial = list(executor.map(lambda c: _trace_chunk(B, m, c), chunks))
    else:
        partial = [_trace_chunk(B, m, c) for c in chunks]
    total = complex(sum(partial, 0j))
    logging.debug("hafnian_trace: n=%d, %d subset chunks", n, len(chunks))
    return _rescaled(total, scale, m, log_form=n > LOG_FORM_ORDER)


def hafnian_repeated(matrix: np.ndarray, repetitions: Sequence[int]) -> complex:
    """Hafnian of the matrix in which index i is repeated s_i times, via

    haf = Σ_{0≤v≤s} (-1)^{Σv} Π C(s_i, v_i) (½ hᵀ A h)^m / m!,  h = s/2 - v,  2m = Σ s.

    Diagonal entries A_ii count: they weight pairings between copies of the same index. Cost Π (s_i + 1).
    The sum alternates; when its rounding bound exceeds REPEATED_RELATIVE_TOLERANCE of the result, the hafnian is
    recomputed by the non-alternating recursion haf(A^(t)) = Σ_j A_kj (t_j - δ_jk) haf(A^(t - e_k - e_j)).
    """
    A = _symmetric(matrix, None)
    s = np.asarray(repetitions, dtype=int)
    if s.shape != (A.shape[0],) or np.any(s < 0):
        raise ParameterDomainError(f"need {A.shape[0]} nonnegative repetitions, got {list(repetitions)}")
    total_count = int(s.sum())
    if total_count % 2:
        return 0j
    if total_count == 0:
        return 1 + 0j
    keep = np.flatnonzero(s)
    A, s = A[np.ix_(keep, keep)], s[keep]
    terms = int(np.prod(s + 1, dtype=float))
    if terms > REPEATED_TERM_LIMIT:
        raise HafnianSizeError(f"repeated-index expansion needs {terms} terms, limit {REPEATED_TERM_LIMIT}")
    m = total_count // 2
    scale = float(np.max(np.abs(A)))
    if scale == 0:
        return 0j
    A = A / scale
    log_form = 2 * m > LOG_FORM_ORDER

    total, magnitude = _finite_difference_sum(A, s, m)
    if (m + 2) * np.finfo(float).eps * magnitude > REPEATED_RELATIVE_TOLERANCE * abs(total):
        logging.debug("repeated-index sum cancels (%.3g of %.3g); using the recursion", abs(total), magnitude)
        return _rescaled(_repeated_recursion(A, s), scale, m, log_form=log_form)
    return _rescaled(total, scale, m, log_form=log_form)


def build_C(G_ph: CovarianceMatrix) -> np.ndarray:
    """C = [[0, 1], [1, 0]] G (1 + G)^{-1}, symmetric."""
    _, K = correlation_kernel(G_ph)
    M = G_ph.M
    C = np.vstack([K[M:], K[:M]])
    return (C + C.T) / 2


def expand_pattern(C: np.ndarray, pattern: Sequence[int]) -> np.ndarray:
    """C̃: row/column ν of each of the four m×m blocks replicated n_ν times, block-contiguous."""
    n = np.asarray(pattern, dtype=int)
    if 2 * len(n) != C.shape[0] or np.any(n < 0):
        raise ParameterDomainError(f"pattern {tuple(pattern)} does not fit a {C.shape[0]}x{C.shape[0]} matrix")
    idx = np.repeat(np.arange(C.shape[0]), np.concatenate([n, n]))
    return C[np.ix_(idx, idx)]


def pattern_probability(
    G_ph: CovarianceMatrix, pattern: Sequence[int], engine: str = "auto", C: Optional[np.ndarray] = None
) -> float:
    """p(n) = haf(C̃) / (√det(1 + G) Π n_ν!); the pattern covers every mode of the supplied covariance."""
    n = _pattern(pattern, G_ph.M)
    log_norm, _ = correlation_kernel(G_ph)
    if sum(n) == 0:
        return float(min(np.exp(-0.5 * log_norm), 1.0))
    if C is None:
        C = build_C(G_ph)
    haf = _pattern_hafnian(C, n, engine)
    denominator = np.exp(0.5 * log_norm) * float(math.prod(math.factorial(k) for k in n))
    p = haf / denominator
    if abs(p.imag) > PROBABILITY_TOLERANCE or p.real < -PROBABILITY_TOLERANCE:
        raise NumericalConsistencyError(f"probability of pattern {n} is {p:.3g}")
    return float(min(max(p.real, 0.0), 1.0))


def engine_costs(pattern: Sequence[int]) -> Tuple[float, float]:
    """Operation-count estimates (repeated, trace) for a pattern."""
    n = np.asarray(pattern, dtype=float)
    total = float(n.sum())
    repeated = float(np.prod((n + 1) ** 2)) * max(1, 2 * int(np.count_nonzero(n))) ** 2
    trace = 2.0**total * max(total, 1.0) ** 3
    return repeated, trace


def _pattern_hafnian(C: np.ndarray, n: OccupationPattern, engine: str) -> complex:
    if engine == "auto":
        repeated, trace = engine_costs(n)
        engine = "repeated" if repeated <= trace or 2 * sum(n) > TRACE_LIMIT else "trace"
        logging.debug("pattern %s: %s engine", n, engine)
    if engine == "repeated":
        return hafnian_repeated(C, list(n) + list(n))
    if engine == "trace":
        return hafnian_trace(expand_pattern(C, n))
    if engine == "matching":
        return hafnian_matching(expand_pattern(C, n))
    raise ParameterDomainError(f"unknown hafnian engine '{engine}'")


def _pattern(pattern: Iterable[int], M: int) -> OccupationPattern:
    n = tuple(int(k) for k in pattern)
    if len(n) != M:
        raise ParameterDomainError(f"pattern {n} must have one count per mode ({M})")
    if any(k < 0 for k in n):
        raise ParameterDomainError(f"pattern {n} has negative counts")
    return n


def _symmetric(matrix: np.ndarray, limit: Optional[int]) -> np.ndarray:
    A = np.asarray(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterDomainError(f"hafnian needs a square matrix, got shape {A.shape}")
    if limit is not None and A.shape[0] > limit:
        raise HafnianSizeError(f"matrix order {A.shape[0]} exceeds engine limit {limit}")
    if A.size and np.max(np.abs(A - A.T)) > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(A)))):
        raise ParameterDomainError("hafnian needs a symmetric matrix")
    return A


def _pair_swap(m: int) -> np.ndarray:
    idx = np.arange(2 * m)
    return idx ^ 1


def _subset_chunks(m: int) -> Iterable[np.ndarray]:
    """Boolean pair masks of all nonempty subsets, by size then lexicographically, in chunks."""
    for size in range(1, m + 1):
        combos = itertools.combinations(range(m), size)
        while True:
            block = list(itertools.islice(combos, TRACE_CHUNK))
            if not block:
                break
            yield np.array(block, dtype=int)


def _trace_chunk(B: np.ndarray, m: int, subsets: np.ndarray) -> complex:
    size = subsets.shape[1]
    idx = np.empty((len(subsets), 2 * size), dtype=int)
    idx[:, 0::2] = 2 * subsets
    idx[:, 1::2] = 2 * subsets + 1
    sub = B[idx[:, :, None], idx[:, None, :]]
    lam = np.linalg.eigvals(sub)
    traces: List[np.ndarray] = []
    power = np.ones_like(lam)
    for _ in range(m):
        power = power * lam
        traces.append(power.sum(axis=1))
    e = [np.ones(len(subsets), dtype=complex)]
    for j in range(1, m + 1):
        acc = np.zeros(len(subsets), dtype=complex)
        for k in range(1, j + 1):
            acc += traces[k - 1] / 2 * e[j - k]
        e.append(acc / j)
    sign = -1.0 if (m - size) % 2 else 1.0
    return complex(sign * np.sum(e[m]))


def _grid_chunks(s: np.ndarray) -> Iterable[np.ndarray]:
    """All integer vectors 0 ≤ v ≤ s in lexicographic order, in chunks."""
    shape = tuple(int(k) + 1 for k in s)
    count = int(np.prod(shape))
    for start in range(0, count, GRID_CHUNK):
        flat = np.arange(start, min(start + GRID_CHUNK, count))
        yield np.stack(np.unravel_index(flat, shape), axis=1)


def _rescaled(value: complex, scale: float, m: int, log_form: bool) -> complex:
    """value · scale^m, through log-magnitude and phase for large orders."""
    if not log_form:
        return complex(value * scale**m)
    if value == 0:
        return 0j
    magnitude = np.exp(np.log(abs(value)) + m * np.log(scale))
    return complex(magnitude * np.exp(1j * np.angle(value)))


def _finite_difference_sum(A: np.ndarray, s: np.ndarray, m: int) -> Tuple[complex, float]:
    """The alternating sum over 0 ≤ v ≤ s, and the sum of its term magnitudes, both divided by m!."""
    binomials = [np.array([math.comb(int(si), v) for v in range(si + 1)], dtype=float) for si in s]
    total = 0j
    magnitude = 0.0
    for v in _grid_chunks(s):
        h = s / 2 - v
        quad = np.einsum("bi,ij,bj->b", h, A, h) / 2
        weight = np.prod([binomials[i][v[:, i]] for i in range(len(s))], axis=0)
        sign = 1 - 2 * (v.sum(axis=1) % 2)
        terms = sign * weight * quad**m
        total += np.sum(terms)
        magnitude += float(np.sum(np.abs(terms)))
    f = math.factorial(m)
    return total / f, magnitude / f


def _repeated_recursion(A: np.ndarray, s: np.ndarray) -> complex:
    """haf(A^(t)) for every 0 ≤ t ≤ s in lexicographic order; each entry needs only smaller t."""
    shape = tuple(int(k) + 1 for k in s)
    table = np.zeros(shape, dtype=complex)
    table[(0,) * len(shape)] = 1
    entries = A.tolist()
    for t in itertools.product(*(range(k) for k in shape)):
        if sum(t) % 2 or not any(t):
            continue
        k = next(i for i, ti in enumerate(t) if ti)
        base = list(t)
        base[k] -= 1
        acc = 0j
        for j, count in enumerate(list(base)):
            if count <= 0:
                continue
            base[j] -= 1
            acc += entries[k][j] * count * table[tuple(base)]
            base[j] += 1
        table[t] = acc
    return complex(table[tuple(int(k) for k in s)])
