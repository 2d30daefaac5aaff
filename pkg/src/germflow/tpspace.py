"""Observables built from transition probabilities.

An observable is a real combination ``f = sum_i mu_i p_{psi_i}`` of the
functions ``p_psi(phi) = p(psi, phi)``.  Squares are taken in spectral form
and the Jordan product is recovered by polarization,
``f o g = ((f + g)^2 - (f - g)^2) / 4``.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import (
    ValidationError,
    anticommutator,
    as_hermitian,
    commutator,
    hermitian_eig,
    symmetrize,
)
from .projective import PureState, as_state, transition_probability

SPECTRAL_FLOOR = 1e-12
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class PureStateCombination:
    """Finite real combination of rank-one functions ``p_psi``."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(mu), as_state(psi)) for mu, psi in self.terms)
        if not terms:
            raise ValidationError("combination needs at least one term")
        dims = {psi.dim for _, psi in terms}
        if len(dims) != 1:
            raise ValidationError(f"combination mixes state dimensions {sorted(dims)}")
        if not all(np.isfinite(mu) for mu, _ in terms):
            raise ValidationError("combination weights must be finite")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, psi, weight=1.0):
        return cls(((weight, psi),))

    @property
    def dim(self):
        return self.terms[0][1].dim

    @property
    def weight_scale(self):
        """``sum |mu_i|``, an upper bound on the sup-norm."""
        return float(sum(abs(mu) for mu, _ in self.terms))

    def __call__(self, phi):
        return sum(mu * transition_probability(psi, phi) for mu, psi in self.terms)

    def __add__(self, other):
        return PureStateCombination(self.terms + other.terms)

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return PureStateCombination(tuple((c * mu, psi) for mu, psi in self.terms))


@dataclass(frozen=True)
class SpectralForm:
    """``f = sum_a lambda_a p_{e_a}`` with mutually orthogonal ``e_a``.

    Pairs are sorted by eigenvalue, largest first.  May be empty (the zero
    function); ``dim`` is carried separately for that case.
    """

    pairs: tuple
    dim: int

    def __call__(self, phi):
        return sum(lam * transition_probability(e, phi) for lam, e in self.pairs)

    @property
    def eigenvalues(self):
        return np.array([lam for lam, _ in self.pairs])

    def operator(self):
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for lam, e in self.pairs:
            out += lam * e.projector()
        return out

    def as_combination(self):
        if not self.pairs:
            # zero function: a single term with zero weight
            return PureStateCombination.single(PureState.basis(self.dim, 0), 0.0)
        return PureStateCombination(self.pairs)

    def projectors(self, tol=DEGENERACY_TOL):
        """Spectral projector per distinct eigenvalue, as ``[(lambda, P)]``.

        Eigenvalues closer than ``tol`` are merged; this is the gauge-free
        content of the form.
        """
        groups = []
        for lam, e in self.pairs:
            if groups and abs(groups[-1][0] - lam) <= tol:
                groups[-1][1].append((lam, e))
            else:
                groups.append((lam, [(lam, e)]))
        return [
            (float(np.mean([l for l, _ in g])), sum(e.projector() for _, e in g))
            for _, g in groups
        ]


def _coerce(f):
    if isinstance(f, SpectralForm):
        return f.as_combination()
    return f


def as_operator(f):
    """``sum mu_i |psi_i><psi_i|``."""
    f = _coerce(f)
    out = np.zeros((f.dim, f.dim), dtype=complex)
    for mu, psi in f.terms:
        out += mu * psi.projector()
    return symmetrize(out)


def _spectral_form(op, scale, dim):
    w, v = hermitian_eig(op)
    floor = SPECTRAL_FLOOR * max(scale, float(np.max(np.abs(w))) if len(w) else 0.0)
    pairs = tuple(
        (float(lam), PureState.from_vector(v[:, k]))
        for k, lam in enumerate(w)
        if abs(lam) > floor
    )
    return SpectralForm(pairs, dim)


def spectral_decompose(f):
    """Spectral representation of a combination.

    Eigenvalues with ``|lambda| <= 1e-12 * sum|mu_i|`` are dropped.
    """
    f = _coerce(f)
    return _spectral_form(as_operator(f), f.weight_scale, f.dim)


def jordan_square(f):
    """``f^2 = sum lambda_a^2 p_{e_a}``, same spectral states as ``f``."""
    f = _coerce(f)
    sf = spectral_decompose(f)
    pairs = sorted(((lam * lam, e) for lam, e in sf.pairs), key=lambda p: -p[0])
    return SpectralForm(tuple(pairs), sf.dim)


def jordan_product(f, g):
    """``f o g = ((f + g)^2 - (f - g)^2) / 4`` via spectral squares."""
    f, g = _coerce(f), _coerce(g)
    if f.dim != g.dim:
        raise ValidationError(f"dimension mismatch: {f.dim} vs {g.dim}")
    plus = jordan_square(f + g).as_combination()
    minus = jordan_square(f - g).as_combination()
    combo = (plus - minus).scaled(0.25)
    return spectral_decompose(combo)


def sup_norm(f):
    """``sup_psi |f(psi)|``, attained on an eigenvector."""
    sf = spectral_decompose(f)
    return float(np.max(np.abs(sf.eigenvalues))) if sf.pairs else 0.0


def associativity_defect(a, b, c):
    """Jordan associator ``(A o B) o C - A o (B o C)``."""
    a, b, c = (as_hermitian(x, n) for x, n in ((a, "A"), (b, "B"), (c, "C")))
    if not a.shape == b.shape == c.shape:
        raise ValidationError("A, B, C must have equal dimensions")
    return anticommutator(anticommutator(a, b), c) - anticommutator(a, anticommutator(b, c))


def associator_closed_form(a, b, c):
    """``[B, [A, C]] / 4`` with plain operator commutators.

    Equal to :func:`associativity_defect`; in terms of
    ``[X, Y]_hbar = i(XY - YX)/hbar`` this is ``-(hbar^2 / 4) [B, [A, C]_hbar]_hbar``.
    """
    return 0.25 * commutator(b, commutator(a, c))
