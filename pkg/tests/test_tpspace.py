import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from germflow.numerics import ValidationError, anticommutator, random_unit_vector
from germflow.projective import PureState
from germflow.tpspace import (
    PureStateCombination,
    as_operator,
    associativity_defect,
    associator_closed_form,
    jordan_product,
    jordan_square,
    spectral_decompose,
    sup_norm,
)


def _combo(r, dim, k):
    return PureStateCombination(tuple((r.normal(), random_unit_vector(dim, r)) for _ in range(k)))


def test_combination_evaluates_pointwise(rng):
    f = _combo(rng, 4, 3)
    phi = random_unit_vector(4, rng)
    direct = sum(mu * abs(np.vdot(psi.amplitudes, phi)) ** 2 for mu, psi in f.terms)
    assert f(phi) == pytest.approx(direct, abs=1e-14)
    assert f(phi) == pytest.approx(np.vdot(phi, as_operator(f) @ phi).real, abs=1e-13)


def test_spectral_form_orthogonal_and_faithful(rng):
    f = _combo(rng, 5, 7)
    sf = spectral_decompose(f)
    np.testing.assert_allclose(sf.operator(), as_operator(f), atol=1e-12)
    states = [e for _, e in sf.pairs]
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            assert abs(np.vdot(states[i].amplitudes, states[j].amplitudes)) ** 2 < 1e-20
    phi = random_unit_vector(5, rng)
    assert sf(phi) == pytest.approx(f(phi), abs=1e-12)


def test_rank_deficient_drops_null_space(rng):
    psi = random_unit_vector(6, rng)
    f = PureStateCombination(((2.0, psi), (-0.5, psi)))
    sf = spectral_decompose(f)
    assert len(sf.pairs) == 1
    assert sf.pairs[0][0] == pytest.approx(1.5)


def test_degenerate_projectors_gauge_free():
    e = np.eye(3)
    f = PureStateCombination(((1.0, e[0]), (1.0, e[1]), (-2.0, e[2])))
    proj = spectral_decompose(f).projectors()
    assert [p[0] for p in proj] == pytest.approx([1.0, -2.0])
    np.testing.assert_allclose(proj[0][1], np.diag([1, 1, 0]), atol=1e-12)


def test_jordan_square_and_product(rng):
    f, g = _combo(rng, 4, 3), _combo(rng, 4, 2)
    A, B = as_operator(f), as_operator(g)
    np.testing.assert_allclose(jordan_square(f).operator(), A @ A, atol=1e-12)
    np.testing.assert_allclose(jordan_product(f, g).operator(), anticommutator(A, B), atol=1e-12)


def test_zero_function():
    psi = PureState.basis(2, 0)
    f = PureStateCombination(((1.0, psi), (-1.0, psi)))
    assert spectral_decompose(f).pairs == ()
    assert sup_norm(f) == 0.0


def test_sup_norm_dominates_samples(rng):
    f = _combo(rng, 3, 4)
    s = sup_norm(f)
    samples = [abs(f(random_unit_vector(3, rng))) for _ in range(200)]
    assert max(samples) <= s + 1e-12
    assert s == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(as_operator(f)))), abs=1e-12)


def test_mixed_dimensions_rejected(rng):
    with pytest.raises(ValidationError):
        PureStateCombination(((1.0, [1, 0]), (1.0, [1, 0, 0])))
    with pytest.raises(ValidationError):
        jordan_product(_combo(rng, 2, 1), _combo(rng, 3, 1))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_jordan_commutative_and_associator(dim, seed):
    r = np.random.default_rng(seed)
    f, g = _combo(r, dim, 2), _combo(r, dim, 3)
    np.testing.assert_allclose(jordan_product(f, g).operator(), jordan_product(g, f).operator(), atol=1e-11)
    a, b, c = (as_operator(_combo(r, dim, 2)) for _ in range(3))
    np.testing.assert_allclose(associativity_defect(a, b, c), associator_closed_form(a, b, c), atol=1e-12)
