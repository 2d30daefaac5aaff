"""Pure states of a finite-dimensional Hilbert space as a transition
probability space carrying the unitary Poisson structure.

An observable ``A`` acts on states through ``f_A(psi) = <psi|A|psi>`` and the
bracket of two such functions is again of that form,
``{f_A, f_B} = f_{[A,B]_hbar}`` with ``[A,B]_hbar = i(AB - BA)/hbar``.
"""

import numpy as np

from .numerics import (
    ValidationError,
    as_hermitian,
    commutator,
    evolve_unitary,
)

NORM_TOL = 1e-12
SAME_RAY_TOL = 1e-10
CLAMP_TOL = 1e-14
IMAG_TOL = 1e-12


class PureState:
    """A unit vector up to global phase.

    Construct from any nonzero amplitude vector with ``PureState.from_vector``
    (normalizes) or directly from an already normalized vector.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        a = np.array(amplitudes, dtype=complex).reshape(-1)
        if a.size < 1 or not np.all(np.isfinite(a)):
            raise ValidationError("state amplitudes must be a non-empty finite vector")
        n = np.linalg.norm(a)
        if abs(n - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (norm {n!r})")
        a.setflags(write=False)
        self.amplitudes = a

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if not n > 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(v / n)

    @classmethod
    def basis(cls, dim, k):
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        return cls(v)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def projector(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def canonical(self):
        """Representative with the largest-modulus component real positive.

        Ties go to the lowest index.  Only meant for serialization; use
        :meth:`same_ray` to compare states.
        """
        a = self.amplitudes
        mod = np.abs(a)
        k = int(np.argmax(mod >= mod.max() - 1e-12))
        return a * (abs(a[k]) / a[k])

    def same_ray(self, other, tol=SAME_RAY_TOL):
        return abs(1.0 - transition_probability(self, other)) < tol

    def __repr__(self):
        return f"PureState(dim={self.dim})"


def as_state(x):
    return x if isinstance(x, PureState) else PureState.from_vector(x)


def _clamp_probability(p):
    if p < -CLAMP_TOL or p > 1.0 + CLAMP_TOL:
        raise ValidationError(f"transition probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def transition_probability(psi, phi):
    """``p(psi, phi) = |<psi|phi>|^2``."""
    a, b = as_state(psi).amplitudes, as_state(phi).amplitudes
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    # |z|^2 of the symmetric pair is identical in either order
    return _clamp_probability(abs(np.vdot(a, b)) ** 2)


def _check_dims(a, psi):
    if a.shape[0] != psi.dim:
        raise ValidationError(f"dimension mismatch: operator {a.shape[0]}, state {psi.dim}")


def expectation(a, psi):
    """``f_A(psi) = <psi|A|psi>`` for Hermitian ``A``."""
    a = as_hermitian(a, "observable")
    psi = as_state(psi)
    _check_dims(a, psi)
    v = psi.amplitudes
    z = np.vdot(v, a @ v)
    scale = max(1.0, float(np.max(np.abs(a))))
    if abs(z.imag) > IMAG_TOL * scale:
        raise ValidationError(f"expectation has imaginary part {z.imag!r}")
    return float(z.real)


def hbar_commutator(a, b, hbar):
    """``[A, B]_hbar = i(AB - BA)/hbar``."""
    if not hbar > 0:
        raise ValidationError("hbar must be positive")
    return 1j * commutator(a, b) / hbar


def poisson_bracket(a, b, hbar, psi):
    """``{f_A, f_B}(psi) = f_{[A,B]_hbar}(psi)``."""
    a = as_hermitian(a, "A")
    b = as_hermitian(b, "B")
    if a.shape != b.shape:
        raise ValidationError("A and B have different dimensions")
    return expectation(hbar_commutator(a, b, hbar), psi)


def hamiltonian_flow(a, hbar, t, psi):
    """Flow of ``f_A`` on the state space: ``psi(t) = exp(-i t A / hbar) psi``."""
    if not hbar > 0:
        raise ValidationError("hbar must be positive")
    a = as_hermitian(a, "generator")
    psi = as_state(psi)
    _check_dims(a, psi)
    return PureState.from_vector(evolve_unitary(a / hbar, t, psi.amplitudes))
