import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from germflow.germs import BosonicUM, HeisenbergGauss, Plane, Ray, Sphere, SpinSU2, momentum_map, spin_matrices
from germflow.meanfield import occupation_basis
from germflow.numerics import ValidationError, random_unit_vector
from germflow.polynomial import PolynomialSpec

SU2 = SpinSU2()


def _random_sphere(r):
    return Sphere(math.acos(r.uniform(-1, 1)), r.uniform(0, 2 * math.pi))


def test_spin_matrices_algebra():
    for L in (1, 2, 5):
        jx, jy, jz = spin_matrices(L)
        j = L / 2
        np.testing.assert_allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-13)
        np.testing.assert_allclose(jx @ jx + jy @ jy + jz @ jz, j * (j + 1) * np.eye(L + 1), atol=1e-12)


def test_su2_conventions():
    assert SU2.spin(4) == 2 and SU2.hbar(4) == 0.5 and SU2.dim(4) == 5
    with pytest.raises(ValidationError):
        SU2.hbar(0)


def test_su2_state_equals_rotation_oracle(rng):
    for L in (1, 3, 8):
        x = _random_sphere(rng)
        assert SU2.state(L, x).same_ray(SU2.rotated_highest_weight(L, x), tol=1e-12)


def test_su2_poles():
    north, south = Sphere(0.0), Sphere(math.pi)
    np.testing.assert_allclose(np.abs(SU2.state(4, north).amplitudes), np.eye(5)[0], atol=1e-15)
    np.testing.assert_allclose(np.abs(SU2.state(4, south).amplitudes), np.eye(5)[4], atol=1e-15)
    assert SU2.overlap(6, north, south) == 0.0


def test_su2_momentum_map_is_unit_vector(rng):
    x = _random_sphere(rng)
    np.testing.assert_allclose(SU2.momentum_map(6, SU2.state(6, x)), x.vector(), atol=1e-12)


def test_sphere_point_normalization():
    assert Sphere(1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)
    with pytest.raises(ValidationError):
        Sphere(4.0)
    v = np.array([1.0, 2.0, -0.5])
    np.testing.assert_allclose(Sphere.from_vector(v).vector(), v / np.linalg.norm(v), atol=1e-15)


def _tensor_oracle(psi, L):
    """Project otimes^L psi onto normalized occupation vectors by brute force."""
    M = len(psi)
    full = psi
    for _ in range(L - 1):
        full = np.kron(full, psi)
    basis = occupation_basis(M, L)
    out = np.zeros(basis.dim, dtype=complex)
    counts = np.zeros(basis.dim)
    for k, idx in enumerate(itertools.product(range(M), repeat=L)):
        row = basis.index(np.bincount(idx, minlength=M))
        out[row] += full[k]
        counts[row] += 1
    return out / np.sqrt(counts)


@pytest.mark.parametrize("M,L", [(2, 3), (3, 4), (4, 3)])
def test_bosonic_state_matches_tensor_product(rng, M, L):
    psi = random_unit_vector(M, rng)
    g = BosonicUM(M)
    np.testing.assert_allclose(g.state(L, Ray(psi)).amplitudes, _tensor_oracle(psi, L), atol=1e-13)


def test_bosonic_momentum_map_of_product_state(rng):
    psi = random_unit_vector(3, rng)
    g = BosonicUM(3)
    rho = momentum_map(g, 5, g.symmetric_state(5, Ray(psi)))
    np.testing.assert_allclose(rho, np.outer(psi, psi.conj()), atol=1e-13)


def test_bosonic_validation():
    with pytest.raises(ValidationError):
        BosonicUM(1)
    with pytest.raises(ValidationError):
        BosonicUM(3).overlap(2, Ray([1, 0]), Ray([0, 1]))
    with pytest.raises(ValidationError):
        SU2.overlap(2, Ray([1, 0]), Sphere(0))


def _grid_1d(q, h):
    s = math.sqrt(h)
    return np.linspace(q - 14 * s, q + 14 * s, 6001)


def test_heisenberg_overlap_quadrature_1d(rng):
    g = HeisenbergGauss(1)
    for L in (1, 4):
        x, y = Plane(rng.normal(), rng.normal()), Plane(rng.normal(), rng.normal())
        a, b = g.state(L, x), g.state(L, y)
        grid = np.union1d(_grid_1d(a.q[0], a.hbar), _grid_1d(b.q[0], b.hbar))
        amp = trapezoid(a.wavefunction(grid[:, None]).conj() * b.wavefunction(grid[:, None]), grid)
        assert abs(amp) ** 2 == pytest.approx(g.overlap(L, x, y), abs=1e-10)


def test_heisenberg_normalization_and_moments():
    g = HeisenbergGauss(1)
    st_ = g.state(2, Plane(0.7, -0.3))
    xs = _grid_1d(-0.3, st_.hbar)
    w = st_.wavefunction(xs[:, None])
    dens = np.abs(w) ** 2
    assert trapezoid(dens, xs) == pytest.approx(1.0, abs=1e-12)
    assert trapezoid(xs * dens, xs) == pytest.approx(-0.3, abs=1e-12)
    assert trapezoid(xs**2 * dens, xs) == pytest.approx(st_.moment([0], [2]), abs=1e-12)
    # <P> = -i hbar <psi|psi'>
    dw = np.gradient(w, xs)
    p_mean = trapezoid((w.conj() * -1j * st_.hbar * dw), xs).real
    assert p_mean == pytest.approx(0.7, abs=1e-4)


def test_heisenberg_pullback_polynomial():
    g = HeisenbergGauss(1)
    x = Plane(0.5, 2.0)
    # variables p, q, z; q^2 + p^2 pulls back to q^2 + p^2 + hbar
    poly = PolynomialSpec([(1.0, (0, 0)), (1.0, (1, 1))], 3)
    for L in (1, 10):
        assert g.pullback_polynomial(poly, L, x) == pytest.approx(4.25 + 1.0 / L)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_overlaps_in_unit_interval_and_symmetric(seed, L):
    r = np.random.default_rng(seed)
    x, y = _random_sphere(r), _random_sphere(r)
    p = SU2.overlap(L, x, y)
    assert 0.0 <= p <= 1.0 + 1e-15
    assert p == pytest.approx(SU2.overlap(L, y, x), abs=1e-15)
    assert SU2.overlap(L, x, x) == pytest.approx(1.0, abs=1e-14)
