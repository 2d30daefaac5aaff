"""The three coherent-state germ families and their phase-space points.

* :class:`HeisenbergGauss` -- Gaussian wave packets on ``T*R^n``; handled
  analytically through :class:`GaussianParams`, never discretized.
* :class:`SpinSU2` -- spin coherent states on the unit sphere.  The schedule
  label ``L`` is the number of spin-1/2 constituents, so the spin is
  ``j = L/2``, the representation has dimension ``L + 1`` and ``hbar = 1/j``.
* :class:`BosonicUM` -- ``otimes^L psi`` for ``psi`` in ``P(C^M)``, with
  ``hbar = 1/L``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..meanfield import (
    CollectiveAlgebra,
    SymmetricState,
    occupation_basis,
    one_body_density,
    product_state,
)
from ..numerics import ValidationError, evolve_unitary
from ..projective import PureState, as_state

TWO_PI = 2.0 * math.pi


# -- phase-space points -----------------------------------------------------

@dataclass(frozen=True)
class Plane:
    """Point ``(p, q)`` of ``T*R^n``."""

    p: tuple
    q: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in np.atleast_1d(self.p))
        q = tuple(float(v) for v in np.atleast_1d(self.q))
        if len(p) != len(q) or not p:
            raise ValidationError("plane point needs p and q of equal positive length")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self):
        return len(self.p)


@dataclass(frozen=True)
class Sphere:
    """Point of the unit sphere; ``phi`` is reduced to ``[0, 2 pi)``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (0.0 <= theta <= math.pi) or not math.isfinite(phi):
            raise ValidationError(f"sphere angles out of range: theta={theta}, phi={phi}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi % TWO_PI)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0]))

    def vector(self):
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class Ray:
    """Point ``psi`` of ``P(C^M)``."""

    psi: PureState

    def __post_init__(self):
        object.__setattr__(self, "psi", as_state(self.psi))

    @property
    def amplitudes(self):
        return self.psi.amplitudes


def _check_L(L):
    if int(L) != L or L < 1:
        raise ValidationError(f"L must be a positive integer, got {L!r}")
    return int(L)


def _expect_point(x, kind, family):
    if not isinstance(x, kind):
        raise ValidationError(f"{family} germ expects a {kind.__name__} point, got {type(x).__name__}")


# -- Heisenberg ---------------------------------------------------------------

@dataclass(frozen=True)
class GaussianParams:
    """``<x|q_hbar(p, q)> = (pi hbar)^(-n/4) exp(-i p.q / 2hbar) exp(i p.x / hbar) exp(-(x-q)^2 / 2hbar)``."""

    q: tuple
    p: tuple
    hbar: float

    def wavefunction(self, x):
        """Evaluate on points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        q, p, h = np.asarray(self.q), np.asarray(self.p), self.hbar
        n = len(q)
        pref = (math.pi * h) ** (-n / 4.0) * np.exp(-0.5j * float(p @ q) / h)
        return pref * np.exp(1j * (x @ p) / h - np.sum((x - q) ** 2, axis=-1) / (2 * h))

    def moment(self, k_p, k_q):
        """Symmetrically ordered moment ``<sym(prod P_i^k_p[i] prod X_i^k_q[i])>``.

        Weyl-ordered moments of a coherent state are moments of its Wigner
        function: independent Gaussians with means ``(p, q)`` and variance
        ``hbar / 2``.
        """
        var = 0.5 * self.hbar
        out = 1.0
        for mean, k in list(zip(self.p, k_p)) + list(zip(self.q, k_q)):
            out *= _gaussian_moment(mean, var, k)
        return out


def _gaussian_moment(mean, var, k):
    total = 0.0
    for m in range(0, k // 2 + 1):
        total += math.comb(k, 2 * m) * mean ** (k - 2 * m) * var**m * _double_factorial(2 * m - 1)
    return total


def _double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class HeisenbergGauss:
    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("Heisenberg germ dimension n must be >= 1")

    name = "heisenberg"
    point_type = Plane

    def hbar(self, L):
        return 1.0 / _check_L(L)

    def state(self, L, x):
        _expect_point(x, Plane, "Heisenberg")
        if x.n != self.n:
            raise ValidationError(f"plane point has n={x.n}, germ has n={self.n}")
        return GaussianParams(x.q, x.p, self.hbar(L))

    def overlap(self, L, x, y):
        """``exp(-(|dq|^2 + |dp|^2) / 2 hbar)``."""
        a, b = self.state(L, x), self.state(L, y)
        d2 = sum((u - v) ** 2 for u, v in zip(a.q, b.q)) + sum((u - v) ** 2 for u, v in zip(a.p, b.p))
        return math.exp(-d2 / (2.0 * a.hbar))

    def nvars(self):
        """Funnel variables: ``p_1..p_n, q_1..q_n, z``."""
        return 2 * self.n + 1

    def classical_coordinates(self, x):
        return np.array(list(x.p) + list(x.q) + [1.0])

    def pullback_polynomial(self, poly, L, x):
        """``<q_hbar(x)| a(-i hbar d/dx, x, 1) |q_hbar(x)>`` with Weyl ordering."""
        g = self.state(L, x)
        n = self.n
        total = 0.0
        for coef, mono in poly.terms():
            k = np.bincount(np.asarray(mono, dtype=int), minlength=2 * n + 1) if mono else np.zeros(2 * n + 1, int)
            total += coef * g.moment(k[:n], k[n : 2 * n])
        return total


# -- SU(2) --------------------------------------------------------------------

@lru_cache(maxsize=128)
def spin_matrices(L):
    """``(J_x, J_y, J_z)`` for spin ``L/2`` in the basis ``m = j, j-1, ..., -j``."""
    j = L / 2.0
    m = j - np.arange(L + 1)
    jp = np.zeros((L + 1, L + 1))
    for k in range(1, L + 1):
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jx = (jp + jp.T) / 2
    jy = (jp - jp.T) / 2j
    mats = (jx.astype(complex), jy, np.diag(m).astype(complex))
    for a in mats:
        a.setflags(write=False)
    return mats


@dataclass(frozen=True)
class SpinSU2:
    name = "spin_su2"
    point_type = Sphere

    def spin(self, L):
        return _check_L(L) / 2.0

    def hbar(self, L):
        return 2.0 / _check_L(L)

    def dim(self, L):
        return _check_L(L) + 1

    def state(self, L, x):
        """Spin coherent state ``exp(-i phi J_z) exp(-i theta J_y) |j, j>``."""
        _expect_point(x, Sphere, "SU(2)")
        L = _check_L(L)
        k = np.arange(L + 1)
        m = L / 2.0 - k
        lbin = 0.5 * np.array([math.lgamma(L + 1) - math.lgamma(i + 1) - math.lgamma(L - i + 1) for i in k])
        c, s = math.cos(x.theta / 2), math.sin(x.theta / 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            lc, ls = np.log(abs(c)), np.log(abs(s))
            logmag = lbin + np.where(L - k > 0, (L - k) * lc, 0.0) + np.where(k > 0, k * ls, 0.0)
        amp = np.exp(logmag) * np.exp(-1j * m * x.phi)
        return PureState.from_vector(amp)

    def rotated_highest_weight(self, L, x):
        """Same state as :meth:`state`, built by exponentiating the generators."""
        _expect_point(x, Sphere, "SU(2)")
        jx, jy, jz = spin_matrices(_check_L(L))
        v = np.zeros(L + 1, dtype=complex)
        v[0] = 1.0
        v = evolve_unitary(jy, x.theta, v)
        v = evolve_unitary(jz, x.phi, v)
        return PureState.from_vector(v)

    def overlap(self, L, x, y):
        """``cos(Theta/2)^(4j) = ((1 + n_x . n_y) / 2)^L``."""
        _expect_point(x, Sphere, "SU(2)")
        _expect_point(y, Sphere, "SU(2)")
        c = 0.5 * (1.0 + float(np.clip(x.vector() @ y.vector(), -1.0, 1.0)))
        return c ** _check_L(L)

    def nvars(self):
        return 3

    def generators(self, L):
        """Scaled generators ``X_a = J_a / j = -i hbar dU(T_a)``."""
        j = self.spin(L)
        return [a / j for a in spin_matrices(_check_L(L))]

    def rotation_generators(self, L):
        return list(spin_matrices(_check_L(L)))

    def classical_coordinates(self, x):
        return x.vector()

    def classical_structure(self):
        """``{x_a, x_b} = -eps_abc x_c``, matching ``[X_a, X_b]_hbar``."""
        return -levi_civita()

    def momentum_map(self, L, state):
        """``hbar <J_a>`` as a vector in R^3 (unit length on coherent states)."""
        psi = as_state(state)
        if psi.dim != L + 1:
            raise ValidationError(f"state has dim {psi.dim}, spin L={L} needs {L + 1}")
        v = psi.amplitudes
        return np.array([np.vdot(v, g @ v).real for g in self.generators(L)])


def levi_civita():
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[b, a, c] = -1.0
    return eps


def rotation_matrix(axis, angle):
    """Right-handed rotation of R^3 by ``angle`` about ``axis``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)


# -- U(M) bosonic ---------------------------------------------------------------

class BosonicUM:
    """``q_hbar(psi) = otimes^L psi`` in ``Sym^L(C^M)``.

    ``algebra`` fixes the generators used for funnels; it defaults to the
    spin-half set for ``M = 2`` and Gell-Mann matrices otherwise.
    """

    name = "bosonic_um"
    point_type = Ray

    def __init__(self, M, algebra=None):
        if int(M) != M or M < 2:
            raise ValidationError("M must be >= 2")
        self.M = int(M)
        self.algebra = algebra if algebra is not None else CollectiveAlgebra.default(self.M)
        if self.algebra.M != self.M:
            raise ValidationError(f"algebra acts on C^{self.algebra.M}, germ on C^{self.M}")

    def __repr__(self):
        return f"BosonicUM(M={self.M})"

    def __eq__(self, other):
        return isinstance(other, BosonicUM) and other.M == self.M

    def __hash__(self):
        return hash(("bosonic", self.M))

    def _check(self, x):
        _expect_point(x, Ray, "U(M)")
        if x.psi.dim != self.M:
            raise ValidationError(f"ray has dim {x.psi.dim}, germ has M={self.M}")

    def hbar(self, L):
        return 1.0 / _check_L(L)

    def dim(self, L):
        return occupation_basis(self.M, _check_L(L)).dim

    def symmetric_state(self, L, x):
        self._check(x)
        return product_state(x.psi, _check_L(L))

    def state(self, L, x):
        return self.symmetric_state(L, x).state()

    def overlap(self, L, x, y):
        """``|<phi|psi>|^(2L)``."""
        self._check(x)
        self._check(y)
        return abs(np.vdot(x.amplitudes, y.amplitudes)) ** (2 * _check_L(L))

    def nvars(self):
        return len(self.algebra)

    def generators(self, L):
        return self.algebra.scaled_collective(occupation_basis(self.M, _check_L(L)))

    def rotation_generators(self, L):
        return [g * L for g in self.generators(L)]

    def classical_coordinates(self, x):
        self._check(x)
        return self.algebra.expectations(x.amplitudes)

    def classical_structure(self):
        return self.algebra.classical_structure()

    def momentum_map(self, L, state):
        """``hbar * rho`` with ``rho_mn = <a_n^dagger a_m>``, an ``M x M`` matrix."""
        L = _check_L(L)
        basis = occupation_basis(self.M, L)
        if isinstance(state, SymmetricState):
            sym = state
        else:
            sym = SymmetricState(basis, as_state(state).amplitudes)
        if sym.basis != basis:
            raise ValidationError("state is not in the symmetric sector for this (M, L)")
        return one_body_density(sym) / L


def germ_state(g, L, x):
    """``q_hbar(x)`` with ``hbar`` fixed by ``L`` through the family."""
    return g.state(L, x)


def germ_overlap(g, L, x, y):
    """Closed-form ``p(q_hbar(x), q_hbar(y))``."""
    return g.overlap(L, x, y)


def momentum_map(g, L, state):
    if not hasattr(g, "momentum_map"):
        raise ValidationError(f"{g!r} has no finite-dimensional momentum map")
    return g.momentum_map(L, state)
