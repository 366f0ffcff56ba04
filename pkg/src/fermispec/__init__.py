"""Entanglement spectra of the open transverse-field Ising chain.

The ground state is a Gaussian fermionic state, so its reduced density
matrices follow from a 2N x 2N Majorana correlation matrix. A dense
spin-basis solver for N <= 12 provides an independent check.
"""

from .model import ChainSpec, MajoranaHamiltonian, build_majorana_hamiltonian
from .freefermion import (
    CorrelationMatrix,
    EntanglementSpectrum,
    NumericalError,
    canonical_form,
    ground_state_correlation,
    half_chain_spectrum,
    reduce,
)
from .spectrum import (
    SchmidtTerm,
    SpectrumSummary,
    chi_effective,
    entropy,
    entropy_contributions,
    overlaps,
    summarize,
    top_k_weights,
    truncation,
)
from .oracle import DenseGroundState, OracleSchmidt, dense_ground_state, oracle_schmidt

__version__ = "0.1.0"
