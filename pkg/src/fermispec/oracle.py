"""Brute-force ground states of short Ising chains in the spin basis.

Used as ground truth for the free-fermion route. Basis states are bit
strings with site 0 as the most significant bit; bit value 0 means
spin up (sz = +1). The spin-flip parity prod_n sz_n commutes with H, so
each parity sector is diagonalised separately and the lower sector
minimum is taken, preferring the even sector on (near-)ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from scipy.special import xlogy

from .model import ChainSpec

__all__ = [
    "MAX_SITES",
    "DenseGroundState",
    "OracleSchmidt",
    "dense_ground_state",
    "oracle_schmidt",
    "spin_hamiltonian",
]

MAX_SITES = 12
DENSE_MAX_SITES = 10
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class DenseGroundState:
    n_sites: int
    energy: float
    amplitudes: np.ndarray = field(repr=False)
    parity: int = 1

    def expectation_z(self) -> np.ndarray:
        """<sz_n> for every site."""
        probs = self.amplitudes**2
        states = np.arange(probs.size)
        out = np.empty(self.n_sites)
        for site in range(self.n_sites):
            bit = (states >> (self.n_sites - 1 - site)) & 1
            out[site] = np.sum(probs * (1 - 2 * bit))
        return out

    def expectation_xx(self) -> np.ndarray:
        """<sx_n sx_{n+1}> for every bond."""
        psi = self.amplitudes
        states = np.arange(psi.size)
        out = np.empty(max(self.n_sites - 1, 0))
        for site in range(self.n_sites - 1):
            mask = 0b11 << (self.n_sites - 2 - site)
            out[site] = psi @ psi[states ^ mask]
        return out


@dataclass(frozen=True)
class OracleSchmidt:
    cut: int
    values: np.ndarray
    entropy_bits: float


def _check_spec(spec: ChainSpec) -> None:
    if spec.n_sites > MAX_SITES:
        raise ValueError(f"oracle is limited to N <= {MAX_SITES}, got N = {spec.n_sites}")


def spin_hamiltonian(spec: ChainSpec, states: np.ndarray | None = None) -> sp.csr_matrix:
    """Sparse H = -sum sx sx - h sum sz on the given basis states.

    `states` must be closed under flipping adjacent pairs of bits; by
    default all 2^N states are used.
    """
    _check_spec(spec)
    n, h = spec.n_sites, spec.field
    if states is None:
        states = np.arange(2**n)
    index = np.full(2**n, -1)
    index[states] = np.arange(states.size)

    n_down = np.zeros(states.size, dtype=int)
    for site in range(n):
        n_down += (states >> site) & 1
    diag = -h * (n - 2 * n_down).astype(float)

    rows, cols, vals = [np.arange(states.size)], [np.arange(states.size)], [diag]
    for site in range(n - 1):
        flipped = index[states ^ (0b11 << (n - 2 - site))]
        if np.any(flipped < 0):
            raise ValueError("basis is not closed under pair flips")
        rows.append(np.arange(states.size))
        cols.append(flipped)
        vals.append(np.full(states.size, -1.0))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(states.size, states.size),
    )


def _sector_ground(spec: ChainSpec, states: np.ndarray) -> tuple[float, np.ndarray]:
    ham = spin_hamiltonian(spec, states)
    if spec.n_sites <= DENSE_MAX_SITES or states.size <= 2:
        w, v = la.eigh(ham.toarray(), subset_by_index=[0, 0])
        return float(w[0]), v[:, 0]
    v0 = np.ones(states.size) / np.sqrt(states.size)
    w, v = sla.eigsh(ham, k=1, which="SA", v0=v0, tol=0.0)
    return float(w[0]), v[:, 0]


def dense_ground_state(spec: ChainSpec) -> DenseGroundState:
    """Exact ground state of the chain (N <= 12) in the sz product basis."""
    _check_spec(spec)
    n = spec.n_sites
    all_states = np.arange(2**n)
    parity_bit = np.zeros(all_states.size, dtype=int)
    for site in range(n):
        parity_bit ^= (all_states >> site) & 1

    sectors = {}
    for parity, bit in ((1, 0), (-1, 1)):
        states = all_states[parity_bit == bit]
        if states.size:
            sectors[parity] = (states, *_sector_ground(spec, states))

    parity = 1
    if -1 in sectors and sectors[-1][1] < sectors[1][1] - DEGENERACY_TOL:
        parity = -1
    states, energy, vec = sectors[parity]

    psi = np.zeros(2**n)
    psi[states] = vec
    psi /= np.linalg.norm(psi)
    # fix the global sign for reproducibility
    lead = np.argmax(np.abs(psi))
    if psi[lead] < 0:
        psi = -psi

    resid = spin_hamiltonian(spec) @ psi - energy * psi
    if np.linalg.norm(resid) > 1e-9 * max(1.0, abs(energy)):
        raise RuntimeError(f"eigensolver residual {np.linalg.norm(resid):.3e} too large")
    psi.setflags(write=False)
    return DenseGroundState(n_sites=n, energy=energy, amplitudes=psi, parity=parity)


def oracle_schmidt(state: DenseGroundState, cut: int) -> OracleSchmidt:
    """Schmidt weights across the bond after the first `cut` sites."""
    n = state.n_sites
    if not 1 <= cut < n:
        raise ValueError(f"cut must lie in [1, {n - 1}], got {cut}")
    mat = state.amplitudes.reshape(2**cut, 2 ** (n - cut))
    sv = la.svdvals(mat)
    values = np.sort(sv**2)[::-1]
    entropy = float(-np.sum(xlogy(values, values)) / np.log(2))
    return OracleSchmidt(cut=cut, values=values, entropy_bits=entropy)
