import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from hdiscord.core import catalogue
from hdiscord.core.linalg import kron
from hdiscord.core.states import ProductBasis, PureState
from hdiscord.errors import DimensionError, DomainError, ResourceError, UnsupportedError
from hdiscord.processors.engine import dh_fixed_basis, optimal_probs, qubit_unitaries
from hdiscord.processors.symmetric import (
    SymmetricMixedState,
    SymmetricPureState,
    dh_symmetric,
    dicke_overlap_amplitudes,
    dicke_state,
    expand_symmetric,
    symmetric_affinity,
    symmetric_from_state,
    symmetric_sigma,
)

theta_st = st.floats(min_value=0.0, max_value=np.pi)
phi_st = st.floats(min_value=0.0, max_value=2 * np.pi)


def _random_symmetric_mixed(n, rng):
    g = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
    rho = g @ g.conj().T
    return SymmetricMixedState.from_matrix(n, rho / np.trace(rho).real)


def test_overlap_amplitudes_match_full_vectors(rng):
    n = 4
    state = SymmetricPureState.normalized(n, rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
    full = expand_symmetric(state).amplitudes
    theta, phi = 1.1, 0.4
    u = qubit_unitaries(theta, phi)
    amps = dicke_overlap_amplitudes(state, theta, phi)
    for k in range(n + 1):
        pattern = kron(*([u[:, 0]] * k + [u[:, 1]] * (n - k)))
        assert amps[k] == pytest.approx(np.vdot(full, pattern), abs=1e-12)


def test_dicke_42_affinity_at_equator():
    # sum_k C(4, k) S_k^2 = 448/1536
    assert symmetric_affinity(dicke_state(4, 2), np.pi / 2, 0.0) ** 2 == pytest.approx(448 / 1536, abs=1e-12)


def test_overlap_amplitudes_reject_non_finite_angles():
    with pytest.raises(DomainError):
        dicke_overlap_amplitudes(dicke_state(3, 1), np.nan, 0.0)


@pytest.mark.parametrize(
    "state,expected",
    [
        (SymmetricPureState.normalized(3, [1, 0, 0, 1]), 1 - 1 / np.sqrt(2)),
        (dicke_state(3, 1), 1 - 1 / np.sqrt(3)),
        (dicke_state(4, 2), 1 - np.sqrt(7 / 24)),
    ],
    ids=["ghz3", "w3", "dicke42"],
)
def test_known_values(state, expected, coarse_scan):
    result = dh_symmetric(state, coarse_scan)
    assert result.value == pytest.approx(expected, abs=1e-6)
    assert result.method == "symmetric"
    assert result.sigma.total() == pytest.approx(1.0)


def test_dicke_42_optimum_on_equator(coarse_scan):
    theta, _ = dh_symmetric(dicke_state(4, 2), coarse_scan).basis_angles()[0]
    assert theta == pytest.approx(np.pi / 2, abs=1e-4)


@seed(11)
@settings(max_examples=20, deadline=None)
@given(theta=theta_st, phi=phi_st)
def test_orbit_form_matches_expanded_state(theta, phi):
    state = _random_symmetric_mixed(3, np.random.default_rng(8))
    full = expand_symmetric(state)
    basis = ProductBasis.uniform(3, theta, phi)
    assert 1 - symmetric_affinity(state, theta, phi) == pytest.approx(dh_fixed_basis(full, basis), abs=1e-10)
    assert np.allclose(symmetric_sigma(state, theta, phi).expanded(), optimal_probs(full, basis), atol=1e-10)


@seed(12)
@settings(max_examples=20, deadline=None)
@given(theta=theta_st, phi=phi_st)
def test_real_states_are_phi_symmetric(theta, phi):
    state = dicke_state(4, 1)
    mixed = SymmetricPureState.normalized(4, [0.3, 0.5, -0.2, 0.1, 0.7])
    for s in (state, mixed):
        assert symmetric_affinity(s, theta, phi) == pytest.approx(symmetric_affinity(s, theta, 2 * np.pi - phi), abs=1e-12)


def test_search_result_is_consistent_with_full_expansion(rng, coarse_scan):
    state = _random_symmetric_mixed(3, rng)
    sym = dh_symmetric(state, coarse_scan)
    assert dh_fixed_basis(expand_symmetric(state), sym.optimal_basis) == pytest.approx(sym.value, abs=1e-9)
    assert sym.diagnostics["grid_cells"] == 61 * 12
    assert sym.optimal_probabilities.shape == (8,)


def test_from_state_recovers_dicke_coefficients():
    sym = symmetric_from_state(catalogue.w_state(3))
    assert np.allclose(np.abs(sym.dicke_coeffs), [0, 1, 0, 0])
    mixed = symmetric_from_state(catalogue.ghz_state(3).density())
    assert isinstance(mixed, SymmetricMixedState)
    assert np.allclose(mixed.matrix(), np.array([[0.5, 0, 0, 0.5], [0] * 4, [0] * 4, [0.5, 0, 0, 0.5]]))


def test_from_state_rejects_non_symmetric_states():
    with pytest.raises(UnsupportedError):
        symmetric_from_state(PureState(catalogue.basis_ket("01"), (2, 2)))
    with pytest.raises(UnsupportedError):
        symmetric_from_state(catalogue.werner_2qubit(0.5))
    with pytest.raises(UnsupportedError):
        symmetric_from_state(catalogue.random_pure_state((3, 3)))


def test_state_validation():
    with pytest.raises(DimensionError):
        SymmetricPureState(3, np.array([1, 0, 0]))
    with pytest.raises(DomainError):
        SymmetricPureState(2, np.array([1, 1, 0]))
    with pytest.raises(DomainError):
        SymmetricMixedState(1, np.array([0.5, 0.6]), np.eye(2))
    with pytest.raises(DomainError):
        dicke_state(3, 5)


def test_large_n_keeps_orbit_form(coarse_scan):
    result = dh_symmetric(dicke_state(20, 10), coarse_scan)
    assert result.optimal_probabilities is None
    assert result.sigma.n == 20
    assert result.sigma.total() == pytest.approx(1.0)
    assert 0.0 < result.value < 1.0
    with pytest.raises(ResourceError):
        result.sigma.expanded()
