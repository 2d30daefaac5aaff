"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays.  Every generator in this package is
Hermitian and small, so exponentials go through the eigendecomposition.
"""

import numpy as np

HERMITIAN_TOL = 1e-12


class ValidationError(ValueError):
    """Input violates a documented precondition."""


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def as_hermitian(a, name="matrix", tol=HERMITIAN_TOL):
    a = as_matrix(a, name)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValidationError(f"{name} is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return a


def symmetrize(a):
    """Hermitian part ``(A + A^dagger)/2``."""
    return 0.5 * (a + a.conj().T)


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    """Jordan product ``(AB + BA)/2``."""
    return 0.5 * (a @ b + b @ a)


def hermitian_eig(h):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in descending
    order and eigenvectors as the columns of the second array.  Ties in the
    eigenvalue are broken by the index of each vector's first max-modulus
    component, and every vector is phased so that component is real positive.
    The output is therefore a deterministic function of the input.
    """
    h = as_hermitian(h)
    w, v = np.linalg.eigh(symmetrize(h))
    mod = np.abs(v)
    lead = np.argmax(mod >= mod.max(axis=0) - 1e-12, axis=0)
    order = np.lexsort((lead, -w))
    w, v, lead = w[order], v[:, order], lead[order]
    phase = v[lead, np.arange(v.shape[1])]
    v = v * (np.abs(phase) / phase)[None, :]
    return w, v


def _check_vector(v, dim):
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != dim:
        raise ValidationError(f"dimension mismatch: operator is {dim}x{dim}, vector has length {v.shape[0]}")
    return v


class Propagator:
    """``t -> exp(-i t H)`` for a fixed Hermitian ``H``, diagonalized once."""

    def __init__(self, h):
        self.eigenvalues, self.eigenvectors = hermitian_eig(h)
        self.dim = len(self.eigenvalues)

    def __call__(self, t, v):
        v = _check_vector(v, self.dim)
        coeff = self.eigenvectors.conj().T @ v
        phases = np.exp(-1j * t * self.eigenvalues)
        if v.ndim == 2:
            phases = phases[:, None]
        return self.eigenvectors @ (phases * coeff)

    def matrix(self, t):
        return (self.eigenvectors * np.exp(-1j * t * self.eigenvalues)) @ self.eigenvectors.conj().T


def evolve_unitary(h, t, v):
    """``exp(-i t H) v`` through the eigendecomposition of ``H``."""
    h = as_hermitian(h)
    _check_vector(v, h.shape[0])
    return Propagator(h)(t, v)


def unitary(h, t):
    return Propagator(h).matrix(t)


def operator_norm(a):
    """Largest singular value; equals max |eigenvalue| for Hermitian input."""
    a = np.asarray(a, dtype=complex)
    if hermiticity_defect(a) <= HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a)))):
        return float(np.max(np.abs(np.linalg.eigvalsh(symmetrize(a)))))
    return float(np.linalg.norm(a, 2))


def random_hermitian(dim, rng, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * symmetrize(a)


def random_unit_vector(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
