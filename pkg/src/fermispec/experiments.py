"""Sweeps over field and system size, and the least-squares fits on them."""

from __future__ import annotations

import math
import os
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .freefermion import EntanglementSpectrum, ground_state_correlation, half_chain_spectrum
from .model import ChainSpec, build_majorana_hamiltonian
from .spectrum import entropy, entropy_contributions, top_k_weights, truncation

__all__ = [
    "SweepRow",
    "FitResult",
    "ErrorRow",
    "SweepError",
    "chain_spectrum",
    "sweep_row",
    "field_sweep",
    "scaling_run",
    "decay_fit",
    "error_row",
    "error_growth",
    "linear_fit",
    "worker_count",
]

THREADS_ENV = "FERMISPEC_THREADS"


class SweepError(RuntimeError):
    """A single sweep point failed; carries the offending parameters."""

    def __init__(self, message: str, n_sites: int, field: float):
        super().__init__(message)
        self.n_sites = n_sites
        self.field = field


@dataclass(frozen=True)
class SweepRow:
    n_sites: int
    field: float
    cut: int
    entropy_bits: float
    lambda_1: float
    lambda_2: float
    lambda_3: float
    lambda_4: float
    overlap_1: float
    overlap_2: float
    overlap_3: float
    overlap_4: float
    s_1: float
    s_2: float
    s_3: float
    nu_min: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    domain: str

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ErrorRow:
    n_sites: int
    field: float
    delta_o: float
    delta_s: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return value
    return min(8, os.cpu_count() or 1)


def _ordered_map(func: Callable, items: Sequence, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))


def chain_spectrum(n_sites: int, field: float, cut: int | None = None) -> EntanglementSpectrum:
    """Mode values of the left `cut` sites (default N/2) of the ground state."""
    gamma = ground_state_correlation(build_majorana_hamiltonian(ChainSpec(n_sites, field)))
    return half_chain_spectrum(gamma, cut)


def sweep_row(n_sites: int, field: float, cut: int | None = None) -> SweepRow:
    """All tabulated quantities for one (N, h, cut) point."""
    cut = n_sites // 2 if cut is None else cut
    try:
        spec = chain_spectrum(n_sites, field, cut)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        raise SweepError(f"N={n_sites}, h={field!r}: {exc}", n_sites, field) from exc
    lam = [t.weight for t in top_k_weights(spec, 4)]
    lam += [0.0] * (4 - len(lam))
    s = entropy_contributions(lam, 3)
    return SweepRow(
        n_sites=n_sites,
        field=float(field),
        cut=cut,
        entropy_bits=entropy(spec),
        lambda_1=lam[0],
        lambda_2=lam[1],
        lambda_3=lam[2],
        lambda_4=lam[3],
        overlap_1=math.sqrt(lam[0]),
        overlap_2=math.sqrt(lam[1]),
        overlap_3=math.sqrt(lam[2]),
        overlap_4=math.sqrt(lam[3]),
        s_1=float(s[0]),
        s_2=float(s[1]),
        s_3=float(s[2]),
        nu_min=float(spec.nus[0]),
    )


def field_sweep(n_sites: int, grid: Iterable[float], cut: int | None = None, workers: int | None = None) -> list[SweepRow]:
    """One row per field value, in input order."""
    grid = [float(h) for h in grid]
    if not grid:
        raise ValueError("field grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("field grid must be ascending")
    return _ordered_map(lambda h: sweep_row(n_sites, h, cut), grid, workers)


def linear_fit(x, y, domain: str = "") -> FitResult:
    """Ordinary least squares y = slope * x + intercept."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need at least two (x, y) pairs of equal length")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    return FitResult(float(slope), float(intercept), residual, domain)


def scaling_run(
    sizes: Sequence[int], field: float = 1.0, workers: int | None = None
) -> tuple[list[SweepRow], FitResult]:
    """Half-chain rows for each N and the fit of S against log2 N.

    At the critical field the slope estimates c/6 = 1/12.
    """
    sizes = [int(n) for n in sizes]
    if len(sizes) < 2:
        raise ValueError("need at least two system sizes")
    bad = [n for n in sizes if n < 8 or n % 2]
    if bad:
        raise ValueError(f"system sizes must be even and >= 8, got {bad}")
    rows = _ordered_map(lambda n: sweep_row(n, field, n // 2), sizes, workers)
    fit = linear_fit(
        np.log2([r.n_sites for r in rows]),
        [r.entropy_bits for r in rows],
        domain=f"entropy_bits_vs_log2_N_h={field!r}",
    )
    return rows, fit


def decay_fit(
    n_sites: int = 50, field: float = 1.0, cut: int | None = None, n_terms: int = 10
) -> tuple[np.ndarray, FitResult]:
    """Fit ln lambda_n against n for the `n_terms` largest weights."""
    spec = chain_spectrum(n_sites, field, cut)
    lam = np.array([t.weight for t in top_k_weights(spec, n_terms)])
    if lam.size < n_terms or np.any(lam <= np.finfo(float).tiny) or not np.all(np.isfinite(lam)):
        raise ArithmeticError(f"the {n_terms} largest weights underflow at N={n_sites}, h={field!r}")
    n = np.arange(1, n_terms + 1)
    return lam, linear_fit(n, np.log(lam), domain=f"ln_lambda_vs_n_1..{n_terms}")


def error_row(n_sites: int, field: float, chi_o: int = 4, chi_s: int = 3) -> ErrorRow:
    """Truncation errors at the half cut.

    ``delta_o`` is the overlap deficit 1 - sum_{n<=chi_o} lambda_n of the
    unnormalised truncated state and ``delta_s`` is S - sum_{n<=chi_s} s_n.
    """
    spec = chain_spectrum(n_sites, field)
    lam = np.array([t.weight for t in top_k_weights(spec, max(chi_o, chi_s))])
    eps, _, _ = truncation(lam, chi_o)
    delta_s = entropy(spec) - math.fsum(entropy_contributions(lam, chi_s))
    return ErrorRow(n_sites, float(field), eps, delta_s)


def error_growth(
    sizes: Sequence[int],
    field: float = 1.0,
    chi_o: int = 4,
    chi_s: int = 3,
    fit_above: int = 100,
    workers: int | None = None,
) -> tuple[list[ErrorRow], FitResult, FitResult]:
    """Truncation errors against N, with linear fits over N > `fit_above`."""
    sizes = [int(n) for n in sizes]
    window = [n for n in sizes if n > fit_above]
    if len(window) < 2:
        raise ValueError(f"need at least two sizes above N = {fit_above}")
    rows = _ordered_map(lambda n: error_row(n, field, chi_o, chi_s), sizes, workers)
    fitted = [r for r in rows if r.n_sites > fit_above]
    x = [r.n_sites for r in fitted]
    fit_o = linear_fit(x, [r.delta_o for r in fitted], domain=f"delta_o_vs_N_gt_{fit_above}")
    fit_s = linear_fit(x, [r.delta_s for r in fitted], domain=f"delta_s_vs_N_gt_{fit_above}")
    return rows, fit_o, fit_s
