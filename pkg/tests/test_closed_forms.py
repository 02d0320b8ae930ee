import logging

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from hdiscord.core import catalogue
from hdiscord.core.linalg import partial_trace
from hdiscord.core.states import ProductBasis, PureState
from hdiscord.errors import ArityError, DimensionError, DomainError
from hdiscord.processors.closed_forms import (
    BellDiagonalSpec,
    XStateSpec,
    bell_diagonal_parameters,
    dh_bell_diagonal,
    dh_isotropic_mlevel,
    dh_pure_bipartite,
    dh_werner_2qubit,
    dh_werner_2qubit_sigma,
    dh_werner_mlevel,
    dh_xstate,
    from_prior,
    isotropic_mlevel_affinity,
    multilevel_sigma,
    prior_dh_isotropic_mlevel,
    prior_dh_werner_mlevel,
    werner_mlevel_affinity,
    werner_mlevel_zero_point,
)
from hdiscord.processors.engine import dh_fixed_basis, optimal_probs

BELL_DH = 1 - 1 / np.sqrt(2)

unit = st.floats(min_value=0.0, max_value=1.0)


# ---------------------------------------------------------------------------
# Pure bipartite
# ---------------------------------------------------------------------------

def test_pure_bipartite_known_values():
    value, sigma = dh_pure_bipartite(catalogue.worked_example_state())
    assert value == pytest.approx(1 - np.sqrt(7 / 8), abs=1e-12)
    assert dh_pure_bipartite(catalogue.bell_state())[0] == pytest.approx(BELL_DH, abs=1e-12)
    assert dh_pure_bipartite(PureState(catalogue.basis_ket("01"), (2, 2)))[0] == pytest.approx(0.0, abs=1e-15)
    assert sigma.probabilities.sum() == pytest.approx(1.0)


def test_pure_bipartite_sigma_lives_on_schmidt_basis(rng):
    psi = catalogue.random_pure_state((2, 3), rng)
    value, sigma = dh_pure_bipartite(psi)
    assert dh_fixed_basis(psi, sigma.basis) == pytest.approx(value, abs=1e-10)
    assert np.allclose(sigma.probabilities, optimal_probs(psi, sigma.basis), atol=1e-10)
    assert np.count_nonzero(sigma.probabilities > 1e-15) == 2


def test_quartic_schmidt_sum_is_reduced_purity(rng):
    psi = catalogue.random_pure_state((3, 4), rng)
    value, _ = dh_pure_bipartite(psi)
    rho_a = partial_trace(psi.projector(), psi.dims, [0])
    assert (1 - value) ** 2 == pytest.approx(np.trace(rho_a @ rho_a).real, abs=1e-10)


def test_pure_bipartite_needs_two_parties():
    with pytest.raises(ArityError):
        dh_pure_bipartite(catalogue.ghz_state(3))


# ---------------------------------------------------------------------------
# Werner and Bell-diagonal
# ---------------------------------------------------------------------------

def test_werner_known_values():
    assert dh_werner_2qubit(0.0) == 0.0
    assert dh_werner_2qubit(0.5) == pytest.approx(0.04896, abs=1e-4)
    assert dh_werner_2qubit(1.0) == pytest.approx(BELL_DH, abs=1e-12)
    with pytest.raises(DomainError):
        dh_werner_2qubit(1.2)


@seed(21)
@settings(max_examples=30, deadline=None)
@given(r=unit)
def test_werner_sigma_attains_the_value(r):
    rho = catalogue.werner_2qubit(r)
    sigma = dh_werner_2qubit_sigma(r)
    assert sigma.probabilities.sum() == pytest.approx(1.0)
    assert dh_fixed_basis(rho, sigma.basis) == pytest.approx(dh_werner_2qubit(r), abs=1e-10)
    assert np.allclose(sigma.probabilities, optimal_probs(rho, sigma.basis), atol=1e-10)


@seed(22)
@settings(max_examples=30, deadline=None)
@given(r=unit)
def test_werner_is_a_bell_diagonal_state(r):
    x = (1 - r) / 4
    value, _ = dh_bell_diagonal(BellDiagonalSpec(x, x, x + r, x))
    assert value == pytest.approx(dh_werner_2qubit(r), abs=1e-12)


def test_bell_diagonal_branches():
    _, sigma = dh_bell_diagonal(BellDiagonalSpec(0.45, 0.45, 0.05, 0.05))
    assert sigma.basis.angles()[0] == pytest.approx((0.0, 0.0))
    # All d_i vanish: the first branch wins
    _, sigma = dh_bell_diagonal(BellDiagonalSpec(0.25, 0.25, 0.25, 0.25))
    assert sigma.basis.angles()[0] == pytest.approx((np.pi / 2, 0.0))
    assert dh_bell_diagonal(BellDiagonalSpec(0.25, 0.25, 0.25, 0.25))[0] == pytest.approx(0.0, abs=1e-15)


def test_bell_diagonal_parameters():
    h, d = bell_diagonal_parameters(BellDiagonalSpec(1.0, 0.0, 0.0, 0.0))
    assert h == pytest.approx(1.0)
    assert np.allclose(d, [1.0, -1.0, 1.0])
    assert dh_bell_diagonal(BellDiagonalSpec(1.0, 0.0, 0.0, 0.0))[0] == pytest.approx(BELL_DH)


def test_bell_diagonal_validation():
    with pytest.raises(DomainError):
        BellDiagonalSpec(0.5, 0.5, 0.5, -0.5)
    with pytest.raises(DomainError):
        BellDiagonalSpec.from_sequence([0.5, 0.5])


@seed(23)
@settings(max_examples=30, deadline=None)
@given(raw=st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=4, max_size=4))
def test_bell_diagonal_sigma_attains_the_value(raw):
    spec = BellDiagonalSpec.from_sequence(np.array(raw) / sum(raw))
    value, sigma = dh_bell_diagonal(spec)
    rho = spec.density()
    assert dh_fixed_basis(rho, sigma.basis) == pytest.approx(value, abs=1e-10)
    assert np.allclose(sigma.probabilities, optimal_probs(rho, sigma.basis), atol=1e-10)


# ---------------------------------------------------------------------------
# X states
# ---------------------------------------------------------------------------

def test_xstate_from_werner_matrix():
    rho = catalogue.werner_2qubit(0.5)
    spec = XStateSpec.from_matrix(rho.matrix, (2, 2))
    assert np.allclose(spec.matrix(), rho.matrix)
    value, sigma = dh_xstate(spec, sanity_trials=20)
    assert value == pytest.approx(dh_werner_2qubit(0.5), abs=1e-12)
    assert sigma.probabilities.sum() == pytest.approx(1.0)


def test_xstate_in_a_declared_basis():
    basis = ProductBasis.uniform(2, np.pi / 2, 0.0)
    b = basis.matrix()
    x_form = np.diag([0.4, 0.1, 0.2, 0.3]).astype(complex)
    x_form[0, 3] = x_form[3, 0] = 0.2
    rho = b @ x_form @ b.conj().T
    spec = XStateSpec.from_matrix(rho, (2, 2), basis)
    assert np.allclose(spec.anti_diagonal, [0.2, 0, 0, 0.2])
    assert np.allclose(spec.matrix(), rho)


def test_xstate_bell_state_passes_sanity_check(caplog):
    spec = XStateSpec((2, 2), [0.0, 0.5, 0.5, 0.0], [0.0, 0.5, 0.5, 0.0])
    with caplog.at_level(logging.WARNING, logger="hdiscord.processors.closed_forms"):
        value, _ = dh_xstate(spec, sanity_trials=200)
    assert value == pytest.approx(BELL_DH, abs=1e-12)
    assert "not optimal" not in caplog.text


def test_xstate_warns_when_the_basis_is_not_optimal(caplog):
    # Bell-diagonal, so X-form in the computational basis, but the x-basis branch is optimal
    rho = BellDiagonalSpec(0.6, 0.0, 0.4, 0.0).density()
    spec = XStateSpec.from_matrix(rho.matrix, (2, 2))
    with caplog.at_level(logging.WARNING, logger="hdiscord.processors.closed_forms"):
        value, _ = dh_xstate(spec, sanity_trials=200)
    assert value > dh_bell_diagonal(BellDiagonalSpec(0.6, 0.0, 0.4, 0.0))[0] + 0.1
    assert "not optimal" in caplog.text


def test_xstate_validation():
    with pytest.raises(DomainError):
        XStateSpec.from_matrix(np.eye(4) / 4 + 0.05 * np.eye(4, k=1) + 0.05 * np.eye(4, k=-1), (2, 2))
    with pytest.raises(DimensionError):
        XStateSpec((3,), [0.2, 0.3, 0.5], [0, 0, 0])
    with pytest.raises(DomainError):
        XStateSpec((2, 2), [0.25] * 4, [0.3, 0, 0, 0.3])
    with pytest.raises(DomainError):
        XStateSpec((2, 2), [0.25] * 4, [0.1, 0, 0, 0.2])


# ---------------------------------------------------------------------------
# Multilevel families
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3, 5])
def test_werner_mlevel_zero_point(m):
    x = werner_mlevel_zero_point(m)
    assert x == pytest.approx(1 / m)
    assert dh_werner_mlevel(m, x) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_isotropic_mlevel_endpoints(m):
    assert isotropic_mlevel_affinity(m, 1.0) == pytest.approx(1 / np.sqrt(m))
    assert dh_isotropic_mlevel(m, 1 / m ** 2) == pytest.approx(0.0, abs=1e-12)


def test_werner_mlevel_qubit_value():
    assert dh_werner_mlevel(2, 1.0) == pytest.approx(1 - np.sqrt(5 / 6), abs=1e-12)
    assert dh_werner_mlevel(2, -1.0) == pytest.approx(BELL_DH, abs=1e-12)


@pytest.mark.parametrize("m,x", [(2, 0.3), (3, -0.4), (4, 0.9), (3, 1.0)])
def test_werner_mlevel_closed_form_matches_computational_basis(m, x):
    rho = catalogue.werner_mlevel(m, x)
    sigma = multilevel_sigma(rho)
    assert dh_fixed_basis(rho, sigma.basis) == pytest.approx(dh_werner_mlevel(m, x), abs=1e-10)


@pytest.mark.parametrize("m,x", [(2, 0.3), (3, 0.05), (4, 0.9), (3, 1.0)])
def test_isotropic_mlevel_closed_form_matches_computational_basis(m, x):
    rho = catalogue.isotropic_mlevel(m, x)
    assert dh_fixed_basis(rho, multilevel_sigma(rho).basis) == pytest.approx(dh_isotropic_mlevel(m, x), abs=1e-10)


@seed(24)
@settings(max_examples=30, deadline=None)
@given(x=st.floats(min_value=-1.0, max_value=1.0), m=st.integers(min_value=2, max_value=6))
def test_prior_measure_relation(x, m):
    assert from_prior(prior_dh_werner_mlevel(m, x)) == pytest.approx(dh_werner_mlevel(m, x), abs=1e-12)
    y = (x + 1) / 2
    assert from_prior(prior_dh_isotropic_mlevel(m, y)) == pytest.approx(dh_isotropic_mlevel(m, y), abs=1e-12)
    assert werner_mlevel_affinity(m, x) <= 1.0


def test_multilevel_domain_errors():
    with pytest.raises(DomainError):
        dh_werner_mlevel(1, 0.5)
    with pytest.raises(DomainError):
        dh_werner_mlevel(3, 1.5)
    with pytest.raises(DomainError):
        dh_isotropic_mlevel(3, -0.1)
    with pytest.raises(DomainError):
        werner_mlevel_zero_point(2.5)


@pytest.mark.parametrize("m", [2, 3])
def test_rank_deficient_endpoints_match_to_round_off(m):
    basis = ProductBasis.computational((m, m))
    werner = catalogue.werner_mlevel(m, -1.0)
    isotropic = catalogue.isotropic_mlevel(m, 1.0)
    assert abs(dh_fixed_basis(werner, basis) - dh_werner_mlevel(m, -1.0)) <= 1e-10
    assert abs(dh_fixed_basis(isotropic, basis) - dh_isotropic_mlevel(m, 1.0)) <= 1e-10
    # Round-off eigenvalues never enter the weights
    assert isotropic.weighted_eigenvectors()[0].size == 1


def test_werner_discord_increases_with_r():
    values = np.array([dh_werner_2qubit(r) for r in np.linspace(0, 1, 100)])
    assert values[0] == 0.0
    assert np.all(np.diff(values) > 0)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_geometric_discord_is_below_prior_measure(m):
    werner_points = [x for x in np.linspace(-0.95, 0.95, 20) if abs(x - 1 / m) > 1e-3]
    for x in werner_points:
        assert dh_werner_mlevel(m, x) < prior_dh_werner_mlevel(m, x)
    iso_points = [x for x in np.linspace(0.05, 0.95, 19) if abs(x - 1 / m ** 2) > 1e-3]
    for x in iso_points:
        assert dh_isotropic_mlevel(m, x) < prior_dh_isotropic_mlevel(m, x)
