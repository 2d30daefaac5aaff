import math

import numpy as np
import pytest

from germflow.germs import (
    BosonicUM,
    HeisenbergGauss,
    Plane,
    Ray,
    SemiclassicalSchedule,
    Sphere,
    SpinSU2,
    bracket_residual,
    classical_bracket_of_pullbacks,
    fit_exponent,
    funnel_limit,
    germ_delta_limit,
    germ_equivalence,
    pullback,
    rotation_matrix,
)
from germflow.numerics import ValidationError
from germflow.polynomial import PolynomialSpec

SU2 = SpinSU2()
X = [PolynomialSpec.variable(a, 3) for a in range(3)]


def test_schedule_validation():
    assert SemiclassicalSchedule([1, 2, 4]).hbar_values(SU2) == [2.0, 1.0, 0.5]
    for bad, msg in (([], "non-empty"), ([2, 2], "strictly increasing"), ([0, 1], "positive"), ([1.5], "integers")):
        with pytest.raises(ValidationError, match=msg):
            SemiclassicalSchedule(bad)


def test_fit_exponent():
    h = np.array([0.5, 0.25, 0.125])
    assert fit_exponent(h, 3 * h**1.5) == pytest.approx(1.5)
    assert fit_exponent(h, [1.0, 0.0, 1.0]) is None
    assert fit_exponent([0.5], [1.0]) is None


def test_su2_delta_limit_example():
    rep = germ_delta_limit(SU2, Sphere(0.0), Sphere(math.pi / 2), [2, 4, 8])
    np.testing.assert_allclose(rep.values, [0.25, 0.0625, 0.00390625], rtol=1e-14)
    assert rep.extras["monotone"] and not rep.extras["same_point"]
    assert rep.extras["rate"] == pytest.approx(math.log(2), rel=1e-12)


def test_delta_limit_same_point():
    x = Ray([0.6, 0.8j])
    rep = germ_delta_limit(BosonicUM(2), x, x, [1, 5, 9])
    assert rep.extras["same_point"]
    np.testing.assert_allclose(rep.values, 1.0, atol=1e-14)


def test_heisenberg_delta_limit():
    rep = germ_delta_limit(HeisenbergGauss(1), Plane(0, 0), Plane(1, 1), [1, 2, 3])
    np.testing.assert_allclose(rep.values, np.exp(-np.array([1, 2, 3])), rtol=1e-14)


def test_equivalence_phase_and_hbar_scaled_rotation():
    pts = [Sphere(0.4, 1.0), Sphere(2.0, 4.0)]
    sched = [4, 16, 64, 256]
    # a state-space phase never matters
    rep = germ_equivalence(SU2, pts, sched, phase=lambda L, x: 0.3 * L)
    assert rep.all_equivalent
    np.testing.assert_allclose([r.values for r in rep.overlaps], 1.0, atol=1e-12)

    def rot(angle_fn):
        def t(L, x):
            return Sphere.from_vector(rotation_matrix([1, 0, 0], angle_fn(L)) @ x.vector())
        return t

    assert germ_equivalence(SU2, pts, sched, transform=rot(lambda L: SU2.hbar(L) ** 2)).all_equivalent
    assert not any(germ_equivalence(SU2, pts, sched, transform=rot(lambda L: 0.2)).equivalent)


def test_pullback_matches_coherent_expectation():
    x = Sphere(1.1, 0.3)
    for L in (2, 7):
        v = x.vector()
        # <X_a> on a coherent state is exactly the classical coordinate
        np.testing.assert_allclose([pullback(X[a], SU2, L)(x) for a in range(3)], v, atol=1e-12)


def test_pullback_validation():
    with pytest.raises(ValidationError):
        pullback(np.eye(2), HeisenbergGauss(1), 1)
    with pytest.raises(ValidationError):
        pullback(np.eye(3), SU2, 4)


def test_funnel_x3_squared_closed_form():
    a = X[2] * X[2]
    rep = funnel_limit(a, SU2, Sphere(math.pi / 3), [4, 8, 16])
    assert rep.limit == pytest.approx(0.25)
    for L, v in zip([4, 8, 16], rep.values):
        assert v == pytest.approx(0.25 + 0.75 / L, rel=1e-12)
    assert rep.report.exponent == pytest.approx(1.0, abs=1e-9)


def test_funnel_bosonic_matches_su2():
    a = X[0] * X[2]
    theta, phi = 0.9, 0.4
    ray = Ray([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    b = funnel_limit(a, BosonicUM(2), ray, [4, 8])
    # spin-half generators are half the SU(2) scaled generators
    s = funnel_limit(a.scaled(0.25), SU2, Sphere(theta, phi), [4, 8])
    np.testing.assert_allclose(b.values, s.values, atol=1e-12)


def _fd_bracket(A, B, L, x, h=1e-5):
    """s * x . (grad F x grad G) with gradients of the degree-zero extension by central differences."""
    def grad(op):
        f = pullback(op, SU2, L)
        return np.array([
            (f(Sphere.from_vector(x.vector() + h * e)) - f(Sphere.from_vector(x.vector() - h * e))) / (2 * h)
            for e in np.eye(3)
        ])
    return -x.vector() @ np.cross(grad(A), grad(B))


@pytest.mark.parametrize("L", [2, 5])
def test_pullback_bracket_matches_finite_differences(rng, L):
    from germflow.numerics import random_hermitian

    A, B = random_hermitian(L + 1, rng), random_hermitian(L + 1, rng)
    x = Sphere(1.2, 2.5)
    assert classical_bracket_of_pullbacks(A, B, SU2, L, x) == pytest.approx(_fd_bracket(A, B, L, x), abs=1e-7)


def test_bracket_residuals():
    grid = [Sphere(t, p) for t in (0.5, 1.5, 2.6) for p in (0.0, 2.0, 4.0)]
    sched = [4, 8, 16, 32]
    # linear funnels are covariant: their pullback bracket is exact
    lin = bracket_residual(X[0], X[1], SU2, grid, sched)
    assert np.all(lin.values < 1e-12)
    quad = bracket_residual(X[2] * X[2], X[0] * X[0], SU2, grid, sched)
    assert quad.strictly_decreasing()
    assert np.all((quad.ratios() > 0.45) & (quad.ratios() < 0.65))


def test_bracket_rejects_unsupported_families():
    with pytest.raises(ValidationError):
        classical_bracket_of_pullbacks(np.eye(1), np.eye(1), HeisenbergGauss(1), 1, Plane(0, 0))
