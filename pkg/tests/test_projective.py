import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from germflow.numerics import ValidationError, random_hermitian, random_unit_vector
from germflow.projective import (
    PureState,
    expectation,
    hamiltonian_flow,
    hbar_commutator,
    poisson_bracket,
    transition_probability,
)


def test_transition_probability_trace_oracle(rng):
    a, b = random_unit_vector(5, rng), random_unit_vector(5, rng)
    pa, pb = np.outer(a, a.conj()), np.outer(b, b.conj())
    assert transition_probability(a, b) == pytest.approx(np.trace(pa @ pb).real, abs=1e-14)


def test_phase_invariance_and_same_ray(rng):
    a = random_unit_vector(4, rng)
    s, t = PureState(a), PureState(np.exp(0.8j) * a)
    assert transition_probability(s, t) == pytest.approx(1.0, abs=1e-14)
    assert s.same_ray(t)
    np.testing.assert_allclose(s.canonical(), t.canonical(), atol=1e-14)


def test_orthogonal_basis_states():
    assert transition_probability(PureState.basis(3, 0), PureState.basis(3, 2)) == 0.0


def test_state_validation():
    with pytest.raises(ValidationError, match="normalized"):
        PureState([1.0, 1.0])
    with pytest.raises(ValidationError, match="zero vector"):
        PureState.from_vector([0, 0])
    with pytest.raises(ValidationError, match="dimension mismatch"):
        transition_probability([1, 0], [1, 0, 0])
    with pytest.raises(ValidationError, match="hbar"):
        hbar_commutator(np.eye(2), np.eye(2), 0.0)


def test_expectation_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        expectation([[0, 1], [0, 0]], [1, 0])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_probability_symmetric_and_bounded(dim, seed):
    r = np.random.default_rng(seed)
    a, b = random_unit_vector(dim, r), random_unit_vector(dim, r)
    p = transition_probability(a, b)
    assert 0.0 <= p <= 1.0
    assert p == transition_probability(b, a)


@pytest.mark.parametrize("hbar", [1.0, 0.1])
def test_bracket_is_derivative_along_flow(rng, hbar):
    # d/dt f_B(Phi^A_t psi) = {f_A, f_B}(psi), central differences
    a, b = random_hermitian(4, rng), random_hermitian(4, rng)
    psi = PureState(random_unit_vector(4, rng))
    h = 1e-5
    fp = expectation(b, hamiltonian_flow(a, hbar, h, psi))
    fm = expectation(b, hamiltonian_flow(a, hbar, -h, psi))
    assert poisson_bracket(a, b, hbar, psi) == pytest.approx((fp - fm) / (2 * h), rel=1e-6, abs=1e-8)


def test_bracket_antisymmetric_and_flow_conserves_energy(rng):
    a, b = random_hermitian(3, rng), random_hermitian(3, rng)
    psi = random_unit_vector(3, rng)
    assert poisson_bracket(a, b, 0.5, psi) == pytest.approx(-poisson_bracket(b, a, 0.5, psi), abs=1e-12)
    e0 = expectation(a, psi)
    assert expectation(a, hamiltonian_flow(a, 0.5, 3.0, psi)) == pytest.approx(e0, abs=1e-12)
