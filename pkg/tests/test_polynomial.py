import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from germflow.germs import SpinSU2
from germflow.numerics import ValidationError
from germflow.polynomial import PolynomialSpec, lie_poisson_bracket

X = [PolynomialSpec.variable(a, 3) for a in range(3)]


def test_json_roundtrip_and_normal_form():
    p = PolynomialSpec.from_json({"terms": [[1.5, [2, 0]], [0.5, [0, 2]], [-1, []]]})
    assert p.coeffs == {(): -1.0, (0, 2): 2.0}
    assert PolynomialSpec.from_json(p.to_json()) == p
    assert p.degree == 2 and not p.is_linear()


def test_index_checks():
    with pytest.raises(ValidationError):
        PolynomialSpec([(1.0, (3,))], nvars=3)
    with pytest.raises(ValidationError):
        PolynomialSpec([(1.0, (-1,))])


def test_evaluation_and_gradient(rng):
    p = X[0] * X[1] * X[1] + X[2].scaled(3.0)
    x = rng.normal(size=(5, 3))
    np.testing.assert_allclose(p(x), x[:, 0] * x[:, 1] ** 2 + 3 * x[:, 2])
    h = 1e-6
    num = np.stack([(p(x + h * e) - p(x - h * e)) / (2 * h) for e in np.eye(3)], axis=-1)
    np.testing.assert_allclose(p.gradient(x), num, atol=1e-8)


def test_operator_on_commuting_matrices_is_classical(rng):
    p = PolynomialSpec([(1.0, (0, 1)), (2.0, (1, 1, 2)), (0.5, ())], 3)
    d = rng.normal(size=(3, 4))
    mats = [np.diag(row) for row in d]
    np.testing.assert_allclose(np.diag(p.operator(mats)).real, p(d.T), atol=1e-13)


def test_operator_symmetrizes_orderings(rng):
    a, b = rng.normal(size=(2, 3, 3))
    a, b = a + a.T, b + b.T
    op = PolynomialSpec([(1.0, (0, 0, 1))]).operator([a, b])
    brute = sum(np.linalg.multi_dot([[a, b][i] for i in perm]) for perm in set(itertools.permutations((0, 0, 1)))) / 3
    np.testing.assert_allclose(op, brute, atol=1e-12)


def test_sphere_bracket_of_coordinates():
    s = SpinSU2().classical_structure()
    assert lie_poisson_bracket(X[0], X[1], s) == X[2].scaled(-1.0)
    assert lie_poisson_bracket(X[2], X[0], s) == X[1].scaled(-1.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.lists(st.integers(0, 2), max_size=3)), min_size=1, max_size=4),
       st.lists(st.tuples(st.floats(-3, 3), st.lists(st.integers(0, 2), max_size=3)), min_size=1, max_size=4))
def test_bracket_is_antisymmetric_and_leibniz(tf, tg):
    s = SpinSU2().classical_structure()
    f, g = PolynomialSpec(tf, 3), PolynomialSpec(tg, 3)
    x = np.array([[0.3, -0.7, 1.1], [1.0, 0.2, -0.4]])
    np.testing.assert_allclose(lie_poisson_bracket(f, g, s)(x), -lie_poisson_bracket(g, f, s)(x), atol=1e-9)
    # grad form: s_abd x_d df/dx_a dg/dx_b
    direct = np.einsum("abd,nd,na,nb->n", s, x, f.gradient(x), g.gradient(x))
    np.testing.assert_allclose(lie_poisson_bracket(f, g, s)(x), direct, atol=1e-9)
