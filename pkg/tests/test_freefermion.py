import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import ortho_group

from fermispec.freefermion import (
    CorrelationMatrix,
    EntanglementSpectrum,
    NumericalError,
    canonical_form,
    ground_state_correlation,
    half_chain_spectrum,
    reduce,
)
from fermispec.model import ChainSpec, build_majorana_hamiltonian
from fermispec.oracle import dense_ground_state, oracle_schmidt
from fermispec.spectrum import entropy, top_k_weights

from conftest import kron_hamiltonian


def gs(n, h):
    return ground_state_correlation(build_majorana_hamiltonian(ChainSpec(n, h)))


@given(n=st.integers(1, 60), h=st.floats(0.0, 5.0))
@settings(max_examples=60, deadline=None)
def test_pure_state_squares_to_minus_identity(n, h):
    m = gs(n, h).matrix
    assert np.max(np.abs(m + m.T)) <= 1e-12
    assert np.allclose(m @ m, -np.eye(2 * n), atol=1e-8)
    assert np.linalg.svd(m, compute_uv=False).max() <= 1 + 1e-10


def test_high_field_is_near_product_state():
    m = gs(4, 10.0).matrix
    onsite = np.array([m[2 * i, 2 * i + 1] for i in range(4)])
    assert np.all(np.abs(np.abs(onsite) - 1) < 1e-2)


@pytest.mark.parametrize("n,h", [(8, 1.0), (4, 10.0), (7, 0.3), (6, 0.0)])
def test_local_correlations_match_oracle(n, h):
    m = gs(n, h).matrix
    state = dense_ground_state(ChainSpec(n, h))
    assert np.allclose(np.diag(m, 1)[0::2], state.expectation_z(), atol=1e-10)
    assert np.allclose(np.diag(m, 1)[1::2], state.expectation_xx(), atol=1e-10)


def test_ground_energy_n8():
    spec = ChainSpec(8, 1.0)
    assert abs(gs(8, 1.0).energy - dense_ground_state(spec).energy) < 1e-10


def test_even_parity_at_zero_field():
    # Pf(M) = <prod sz>; for the block form it reduces to det of the odd/even block
    m = gs(6, 0.0).matrix
    assert np.linalg.det(m[0::2, 1::2]) == pytest.approx(1.0)
    spectrum = half_chain_spectrum(gs(6, 0.0))
    assert entropy(spectrum) == pytest.approx(1.0, abs=1e-12)


def test_reduce_identity_and_bookkeeping():
    g = gs(5, 0.7)
    assert np.array_equal(reduce(g, range(5)).matrix, g.matrix)
    g2 = gs(2, 1.0)
    assert np.array_equal(reduce(g2, [0]).matrix, g2.matrix[:2, :2])
    sub = reduce(g, [1, 3])
    assert np.array_equal(sub.matrix, g.matrix[np.ix_([2, 3, 6, 7], [2, 3, 6, 7])])


@pytest.mark.parametrize("region", [[], [5], [-1], [0, 0]])
def test_reduce_rejects_bad_regions(region):
    with pytest.raises(ValueError):
        reduce(gs(5, 1.0), region)


def test_full_state_modes_are_one():
    spec = canonical_form(gs(9, 0.8))
    assert np.allclose(spec.nus, 1.0, atol=1e-10)
    assert len(spec) == 9


def test_two_site_single_mode_matches_reduced_density_matrix():
    ham = kron_hamiltonian(2, 1.0)
    w, v = np.linalg.eigh(ham)
    psi = v[:, 0].reshape(2, 2)
    rho = psi @ psi.T
    lam = np.sort(np.linalg.eigvalsh(rho))[::-1]
    nu_expected = lam[0] - lam[1]

    spec = canonical_form(reduce(gs(2, 1.0), [0]))
    assert spec.nus.size == 1
    assert spec.nus[0] == pytest.approx(nu_expected, abs=1e-12)
    assert (1 + spec.nus[0]) / 2 == pytest.approx(lam[0], abs=1e-12)


def test_half_chain_n8_matches_oracle():
    spec = half_chain_spectrum(gs(8, 1.0), 4)
    exact = oracle_schmidt(dense_ground_state(ChainSpec(8, 1.0)), 4)
    lam = np.array([t.weight for t in top_k_weights(spec, 16)])
    assert np.max(np.abs(lam - exact.values)) < 1e-10


def test_high_field_large_chain():
    # off criticality the leading mode saturates: N = 50 agrees with the exact N = 12 value
    spec = half_chain_spectrum(gs(50, 2.0), 25)
    exact = oracle_schmidt(dense_ground_state(ChainSpec(12, 2.0)), 6)
    assert spec.nus.min() == pytest.approx(exact.values[0] - exact.values[1], abs=1e-5)
    assert spec.nus.min() > 0.96
    assert np.all(spec.nus[1:] > 0.9999)


def test_limit_entropy_at_strong_field():
    assert entropy(half_chain_spectrum(gs(40, 10.0))) < 1e-2


def _pairing_orthogonal(rng, n_modes):
    """Random orthogonal matrix that commutes with the canonical block structure."""
    blocks = []
    for _ in range(n_modes):
        t = rng.uniform(0, 2 * np.pi)
        blocks.append(np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]))
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for i, b in enumerate(blocks):
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = b
    return out


@pytest.mark.parametrize("seed", range(5))
def test_orthogonal_invariance(seed):
    rng = np.random.default_rng(seed)
    g = reduce(gs(14, rng.uniform(0.3, 1.5)), range(6))
    base = canonical_form(g).nus
    # general orthogonal conjugation preserves antisymmetry and singular values
    q = ortho_group.rvs(12, random_state=seed)
    m = q @ g.matrix @ q.T
    m = 0.5 * (m - m.T)
    rotated = canonical_form(CorrelationMatrix(m, g.sites)).nus
    assert np.allclose(rotated, base, atol=1e-10)
    r = _pairing_orthogonal(rng, 6)
    m2 = r @ g.matrix @ r.T
    assert np.allclose(canonical_form(CorrelationMatrix(0.5 * (m2 - m2.T), g.sites)).nus, base, atol=1e-10)


@pytest.mark.parametrize("n,h,cut", [(20, 1.0, 7), (31, 0.6, 12), (16, 1.4, 8), (25, 0.2, 3)])
def test_complementary_regions_share_spectrum(n, h, cut):
    g = gs(n, h)
    left = canonical_form(reduce(g, range(cut))).nus
    right = canonical_form(reduce(g, range(cut, n))).nus
    trim = lambda x: np.sort(x[x < 1 - 1e-8])
    assert np.allclose(trim(left), trim(right), atol=1e-8)


def test_canonical_form_rejects_unpaired_input():
    m = np.zeros((4, 4))
    m[0, 1], m[1, 0] = 0.9, -0.9
    m[2, 3], m[3, 2] = 0.2, -0.2
    canonical_form(CorrelationMatrix(m, (0, 1)))
    with pytest.raises(ValueError):
        CorrelationMatrix(m + np.diag([0.1, 0, 0, 0]), (0, 1))
    bad = np.zeros((4, 4))
    bad[0, 1], bad[1, 0] = 1.5, -1.5
    with pytest.raises(NumericalError):
        canonical_form(CorrelationMatrix(bad, (0, 1)))


def test_spectrum_clamps_spill():
    spec = EntanglementSpectrum(np.array([1 + 5e-11, -5e-11]), 2)
    assert spec.nus.tolist() == [0.0, 1.0]
    with pytest.raises(ValueError):
        EntanglementSpectrum(np.array([1.1]), 1)
    with pytest.raises(ValueError):
        EntanglementSpectrum(np.array([0.5, 0.5]), 3)
