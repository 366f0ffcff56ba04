"""Open transverse-field Ising chain and its Majorana coupling matrix.

The chain is

    H = - sum_{n<N} sx_n sx_{n+1} - h sum_n sz_n

with free ends. Under the Jordan-Wigner map each site n carries two
Majorana operators c_{2n-1}, c_{2n} (normalised so that c^2 = 1):

    c_{2n-1} = (prod_{k<n} sz_k) sx_n,    c_{2n} = (prod_{k<n} sz_k) sy_n

which gives ``sz_n = -i c_{2n-1} c_{2n}`` and
``sx_n sx_{n+1} = -i c_{2n} c_{2n+1}``. Writing H = (i/4) sum A_mn c_m c_n
with A real antisymmetric fixes A_{2n-1,2n} = 2h and A_{2n,2n+1} = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ChainSpec", "MajoranaHamiltonian", "build_majorana_hamiltonian"]


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameters of an open Ising chain.

    Parameters
    ----------
    n_sites : int
        Number of spins N (>= 1).
    field : float
        Transverse field h (finite, >= 0).
    """

    n_sites: int
    field: float
    boundary: str = "open"

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites:
            raise ValueError(f"n_sites must be an integer, got {self.n_sites!r}")
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")
        if not math.isfinite(self.field):
            raise ValueError(f"field must be finite, got {self.field!r}")
        if self.field < 0:
            raise ValueError(f"field must be non-negative, got {self.field!r}")
        if self.boundary != "open":
            raise ValueError("only open boundary conditions are supported")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "field", float(self.field))


@dataclass(frozen=True)
class MajoranaHamiltonian:
    """Quadratic Majorana form H = (i/4) sum_mn A_mn c_m c_n.

    Only the odd/even block of A is nonzero for this chain, so the full
    matrix is stored alongside ``chiral_block`` B with
    ``B[i, j] = A[2i, 2j+1]`` (0-based), i.e. rows label the first Majorana
    of each site and columns the second.
    """

    spec: ChainSpec
    couplings: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.couplings.shape[0]

    @property
    def n_sites(self) -> int:
        return self.spec.n_sites

    @property
    def chiral_block(self) -> np.ndarray:
        return self.couplings[0::2, 1::2]

    def n_couplings(self) -> int:
        """Number of independent nonzero entries (upper triangle)."""
        return int(np.count_nonzero(np.triu(self.couplings, 1)))


def build_majorana_hamiltonian(spec: ChainSpec) -> MajoranaHamiltonian:
    """Coupling matrix A for the open Ising chain described by `spec`.

    Field terms sit on Majorana pairs (2n-1, 2n) and bond terms on
    (2n, 2n+1), 1-based. The scale is such that the ground energy equals
    minus half the sum of the singular values of A's odd/even block.
    """
    n = spec.n_sites
    a = np.zeros((2 * n, 2 * n))
    for site in range(n):
        a[2 * site, 2 * site + 1] = 2.0 * spec.field
    for site in range(n - 1):
        a[2 * site + 1, 2 * site + 2] = 2.0
    a = a - a.T
    a.setflags(write=False)
    return MajoranaHamiltonian(spec=spec, couplings=a)
