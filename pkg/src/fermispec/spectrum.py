"""Reduced density matrix eigenvalues built from canonical mode values.

A reduced Gaussian state with mode values nu_k has eigenvalues

    lambda_eta = prod_k (1 + (-1)^{n_k} nu_k) / 2

labelled by occupation patterns eta = (n_1, ..., n_N'). The largest ones
are found by best-first search over patterns, so only the terms that are
actually requested are ever generated.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .freefermion import EntanglementSpectrum

__all__ = [
    "FROZEN_TOL",
    "SchmidtTerm",
    "SpectrumSummary",
    "iter_terms",
    "top_k_weights",
    "entropy",
    "binary_entropy",
    "truncation",
    "overlaps",
    "entropy_contributions",
    "chi_effective",
    "summarize",
]

# modes this close to 1 have flip weights below 1e-14 of their parent
FROZEN_TOL = 1e-14
TAIL_TOL = 1e-15
LN2 = math.log(2.0)


@dataclass(frozen=True, order=False)
class SchmidtTerm:
    """One eigenvalue of the reduced density matrix.

    ``occupation[k]`` is n_k for the k-th entry of the (ascending) mode
    values the term was built from.
    """

    occupation: tuple[int, ...]
    weight: float

    @property
    def overlap(self) -> float:
        return math.sqrt(self.weight)


@dataclass(frozen=True)
class SpectrumSummary:
    entropy_bits: float
    top_terms: tuple[SchmidtTerm, ...]
    chi_prime: int
    epsilon: float
    overlap: float
    overlaps: np.ndarray
    entropy_contribs: np.ndarray
    chi_eff: int

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.top_terms])


def iter_terms(spec: EntanglementSpectrum | Sequence[float]) -> Iterator[SchmidtTerm]:
    """Yield Schmidt terms in order of non-increasing weight.

    Flipping mode k multiplies a weight by r_k = (1 - nu_k)/(1 + nu_k).
    Modes are visited in order of increasing nu (decreasing r), and each
    pattern is reached exactly once: a pattern whose highest flipped mode
    is j spawns the pattern with j+1 added and the one with j moved to
    j+1. Both children weigh no more than the parent, so a heap keyed on
    the accumulated log cost pops terms in sorted order. Equal weights are
    ordered by the integer sum_k n_k 2^k, which also never decreases along
    the tree.
    """
    nus = spec.nus if isinstance(spec, EntanglementSpectrum) else np.sort(np.asarray(spec, dtype=float))
    n_modes = nus.size
    frozen = np.where(nus > 1.0 - FROZEN_TOL, 1.0, nus)
    base = math.fsum(np.log1p(frozen) - LN2)
    # cost of flipping mode k, ascending in k; inf for frozen modes
    with np.errstate(divide="ignore"):
        costs = (np.log1p(frozen) - np.log1p(-frozen)).tolist()

    def emit(flipped: tuple[int, ...]) -> SchmidtTerm:
        occ = [0] * n_modes
        for k in flipped:
            occ[k] = 1
        if any(math.isinf(costs[k]) for k in flipped):
            return SchmidtTerm(tuple(occ), 0.0)
        return SchmidtTerm(tuple(occ), math.exp(base - math.fsum(costs[k] for k in flipped)))

    def key(flipped: tuple[int, ...]) -> tuple[float, int]:
        return math.fsum(costs[k] for k in flipped), sum(1 << k for k in flipped)

    yield emit(())
    if n_modes == 0:
        return
    heap = [(*key((0,)), (0,))]
    while heap:
        _, _, flipped = heapq.heappop(heap)
        yield emit(flipped)
        last = flipped[-1]
        if last + 1 < n_modes:
            grown = flipped + (last + 1,)
            moved = flipped[:-1] + (last + 1,)
            heapq.heappush(heap, (*key(grown), grown))
            heapq.heappush(heap, (*key(moved), moved))


def top_k_weights(spec: EntanglementSpectrum | Sequence[float], k: int) -> list[SchmidtTerm]:
    """The `k` largest reduced-density-matrix eigenvalues, descending."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return list(itertools.islice(iter_terms(spec), k))


def binary_entropy(x) -> np.ndarray:
    """H(x) = -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0."""
    x = np.asarray(x, dtype=float)
    return -(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / LN2


def entropy(spec: EntanglementSpectrum | Sequence[float]) -> float:
    """Entanglement entropy in bits, sum_k H((1 + nu_k)/2)."""
    nus = spec.nus if isinstance(spec, EntanglementSpectrum) else np.asarray(spec, dtype=float)
    plus, minus = (1.0 + nus) / 2.0, (1.0 - nus) / 2.0
    return float(math.fsum(-(xlogy(plus, plus) + xlogy(minus, minus)) / LN2))


def truncation(lambdas: Sequence[float], chi_prime: int) -> tuple[float, float, np.ndarray]:
    """Keep the `chi_prime` largest weights of a descending list.

    Returns
    -------
    epsilon : float
        Discarded weight, 1 - sum of the kept weights.
    overlap : float
        <Psi'|Psi> = sqrt(1 - epsilon).
    kept : np.ndarray
        Renormalised weights lambda_n / (1 - epsilon).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if chi_prime < 1:
        raise ValueError(f"chi_prime must be >= 1, got {chi_prime}")
    if chi_prime > lambdas.size:
        tail = 1.0 - math.fsum(lambdas)
        if tail > TAIL_TOL:
            raise ValueError(
                f"chi_prime = {chi_prime} exceeds the {lambdas.size} available weights "
                f"and the missing weight {tail:.3e} is not negligible"
            )
    kept = lambdas[:chi_prime]
    eps = min(max(1.0 - math.fsum(kept), 0.0), 1.0)
    if eps >= 1.0:
        raise ValueError("kept weights sum to zero")
    return eps, math.sqrt(1.0 - eps), kept / (1.0 - eps)


def overlaps(spec: EntanglementSpectrum | Sequence[float], k: int) -> np.ndarray:
    """Overlaps O_n = sqrt(lambda_n) of the `k` leading Schmidt terms."""
    return np.sqrt([t.weight for t in top_k_weights(spec, k)])


def entropy_contributions(terms: Sequence[SchmidtTerm] | Sequence[float], k: int | None = None) -> np.ndarray:
    """s_n = -lambda_n log2 lambda_n for the first `k` terms."""
    lam = np.array([t.weight if isinstance(t, SchmidtTerm) else t for t in terms], dtype=float)
    if k is not None:
        lam = lam[:k]
    return -xlogy(lam, lam) / LN2


def chi_effective(spec: EntanglementSpectrum, delta: float, max_terms: int = 1 << 16) -> int:
    """Smallest chi' whose leading entropy contributions reach S within `delta`.

    Gives up after `max_terms` terms (or when all terms are exhausted) and
    returns the number of terms examined.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    target = entropy(spec)
    partial = []
    count = 0
    for count, term in enumerate(itertools.islice(iter_terms(spec), max_terms), start=1):
        if term.weight > 0:
            partial.append(-term.weight * math.log2(term.weight))
        if target - math.fsum(partial) < delta:
            return count
    return count


def summarize(spec: EntanglementSpectrum, k: int = 10, chi_prime: int = 4, delta: float = 1e-4) -> SpectrumSummary:
    """Collect entropy, leading terms and truncation data for one spectrum."""
    terms = top_k_weights(spec, max(k, chi_prime))
    lam = np.array([t.weight for t in terms])
    eps, ovl, _ = truncation(lam, chi_prime)
    return SpectrumSummary(
        entropy_bits=entropy(spec),
        top_terms=tuple(terms[:k]),
        chi_prime=chi_prime,
        epsilon=eps,
        overlap=ovl,
        overlaps=np.sqrt(lam[:k]),
        entropy_contribs=entropy_contributions(lam, k),
        chi_eff=chi_effective(spec, delta),
    )
