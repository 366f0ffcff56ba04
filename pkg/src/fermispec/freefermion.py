"""Gaussian ground state of the Majorana form and its entanglement modes.

Correlations are stored as the real antisymmetric matrix

    M_jk = -i <c_j c_k>   (j != k),    M_jj = 0,

so that M_{2n-1,2n} = <sz_n> and M_{2n,2n+1} = <sx_n sx_{n+1}>. A pure
Gaussian state has M @ M = -1; tracing out a site deletes its two rows
and columns.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .model import MajoranaHamiltonian

__all__ = [
    "CorrelationMatrix",
    "EntanglementSpectrum",
    "NumericalError",
    "ground_state_correlation",
    "reduce",
    "canonical_form",
    "edge_region",
    "half_chain_spectrum",
]

ZERO_MODE_TOL = 1e-12
ANTISYM_TOL = 1e-12
CLAMP_TOL = 1e-10
PAIRING_TOL = 1e-8


class NumericalError(RuntimeError):
    """A linear-algebra step failed or produced structurally invalid output."""


@dataclass(frozen=True)
class CorrelationMatrix:
    """Majorana correlations of a (possibly reduced) Gaussian state.

    Attributes
    ----------
    matrix : np.ndarray
        Real antisymmetric 2N' x 2N' matrix M.
    sites : tuple of int
        0-based chain sites carried by the rows, two Majoranas each.
    energy : float or None
        Ground energy, set only for untraced ground states.
    mode_energies : np.ndarray or None
        Single-particle energies (ascending), untraced ground states only.
    """

    matrix: np.ndarray = field(repr=False)
    sites: tuple[int, ...]
    energy: float | None = None
    mode_energies: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != 2 * len(self.sites):
            raise ValueError(f"matrix shape {m.shape} does not match {len(self.sites)} sites")
        if m.size and np.max(np.abs(m + m.T)) > ANTISYM_TOL:
            raise ValueError("correlation matrix is not antisymmetric")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def gamma(self) -> np.ndarray:
        """The imaginary correlation matrix Gamma = i M."""
        return 1j * self.matrix


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Canonical mode values nu_k of a reduced state, ascending.

    Each mode contributes the factors (1 + nu_k)/2 and (1 - nu_k)/2 to the
    reduced density matrix eigenvalues; nu = 1 is an unentangled mode.
    """

    nus: np.ndarray
    region_size: int

    def __post_init__(self):
        nus = np.sort(np.asarray(self.nus, dtype=float).ravel())
        if nus.size != self.region_size:
            raise ValueError(f"expected {self.region_size} mode values, got {nus.size}")
        if nus.size and (nus[0] < -CLAMP_TOL or nus[-1] > 1 + CLAMP_TOL):
            raise ValueError("mode values outside [0, 1]")
        nus = np.clip(nus, 0.0, 1.0)
        nus.setflags(write=False)
        object.__setattr__(self, "nus", nus)

    def __len__(self) -> int:
        return self.region_size


def ground_state_correlation(ham: MajoranaHamiltonian) -> CorrelationMatrix:
    """Correlation matrix of the lowest-energy Gaussian state of `ham`.

    The chain couples only first to second Majoranas, so A is
    [[0, B], [-B^T, 0]] in odd/even ordering and the singular value
    decomposition B = U diag(s) V^T is its orthogonal block
    diagonalisation. The energy -1/4 tr(A^T M) is minimised by
    M_odd,even = U V^T, giving E = -sum(s)/2.

    Zero modes (s < 1e-12) leave the sign of one block free; it is fixed so
    that det(U V^T) = +1, which is the even sector of prod_n sz_n.
    """
    b = ham.chiral_block
    try:
        u, s, vt = la.svd(b, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"block diagonalisation failed: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("block diagonalisation returned non-finite mode energies")

    if s.size and s[-1] < ZERO_MODE_TOL:
        if np.linalg.det(u) * np.linalg.det(vt) < 0:
            vt[-1, :] *= -1.0
    w = u @ vt

    n = ham.n_sites
    m = np.zeros((2 * n, 2 * n))
    m[0::2, 1::2] = w
    m[1::2, 0::2] = -w.T
    return CorrelationMatrix(
        matrix=m,
        sites=tuple(range(n)),
        energy=-0.5 * float(np.sum(s)),
        mode_energies=s[::-1].copy(),
    )


def reduce(gamma: CorrelationMatrix, region: Iterable[int]) -> CorrelationMatrix:
    """Restrict `gamma` to the sites in `region` (0-based chain indices).

    Every other site is traced out by deleting its two Majorana rows and
    columns. Sites are kept in the order given.
    """
    region = tuple(int(r) for r in region)
    if not region:
        raise ValueError("region must be nonempty")
    if len(set(region)) != len(region):
        raise ValueError(f"region has repeated sites: {region}")
    position = {site: i for i, site in enumerate(gamma.sites)}
    missing = [r for r in region if r not in position]
    if missing:
        raise ValueError(f"sites {missing} are not in the state (sites {gamma.sites[0]}..{gamma.sites[-1]})")
    idx = np.array([2 * position[r] + j for r in region for j in (0, 1)])
    return CorrelationMatrix(matrix=gamma.matrix[np.ix_(idx, idx)], sites=region)


def canonical_form(gamma_bar: CorrelationMatrix) -> EntanglementSpectrum:
    """Mode values nu_k of a reduced correlation matrix.

    An orthogonal change of Majorana basis brings M to a direct sum of
    blocks [[0, nu_k], [-nu_k, 0]]; the nu_k are therefore the singular
    values of M, each appearing twice.
    """
    sv = np.sort(la.svdvals(gamma_bar.matrix))
    lo, hi = sv[0::2], sv[1::2]
    if np.max(np.abs(hi - lo), initial=0.0) > PAIRING_TOL:
        raise NumericalError("singular values are not paired; input is not antisymmetric")
    if sv.size and sv[-1] > 1 + CLAMP_TOL:
        raise NumericalError(f"singular value {sv[-1]!r} exceeds 1")
    return EntanglementSpectrum(nus=0.5 * (lo + hi), region_size=len(gamma_bar.sites))


def edge_region(cut: int) -> range:
    """The first `cut` sites, counted from the left edge."""
    return range(cut)


def half_chain_spectrum(gamma: CorrelationMatrix, cut: int | None = None) -> EntanglementSpectrum:
    """Spectrum of the left block of `cut` sites (default: half the chain)."""
    n = len(gamma.sites)
    if cut is None:
        cut = n // 2
    if not 1 <= cut <= n:
        raise ValueError(f"cut must lie in [1, {n}], got {cut}")
    return canonical_form(reduce(gamma, edge_region(cut)))
