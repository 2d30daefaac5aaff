"""Real polynomials in generator variables ``x_0, ..., x_{n-1}``.

The same object serves as a classical function (commuting variables) and,
through :meth:`PolynomialSpec.operator`, as a quantum observable in which each
monomial is averaged over the orderings of its factors.
"""

import itertools
import math
from collections import defaultdict

import numpy as np

from .numerics import ValidationError, symmetrize


class PolynomialSpec:
    """``sum_k c_k prod_{a in m_k} x_a``; monomials are index sequences."""

    __slots__ = ("coeffs", "nvars")

    def __init__(self, terms=(), nvars=None):
        coeffs = defaultdict(float)
        for coef, mono in terms:
            coef = float(coef)
            if not math.isfinite(coef):
                raise ValidationError("polynomial coefficients must be finite")
            mono = tuple(sorted(int(i) for i in mono))
            if any(i < 0 for i in mono):
                raise ValidationError(f"negative generator index in monomial {mono}")
            coeffs[mono] += coef
        self.coeffs = {m: c for m, c in sorted(coeffs.items()) if c != 0.0}
        top = max((max(m) for m in self.coeffs if m), default=-1) + 1
        if nvars is not None and top > nvars:
            raise ValidationError(f"generator index {top - 1} out of range for {nvars} generators")
        self.nvars = nvars if nvars is not None else top

    @classmethod
    def constant(cls, c, nvars=None):
        return cls([(c, ())], nvars)

    @classmethod
    def variable(cls, a, nvars=None):
        return cls([(1.0, (a,))], nvars)

    @classmethod
    def from_json(cls, obj, nvars=None):
        """``{"terms": [[coef, [i, j, ...]], ...]}`` with 0-based indices."""
        return cls([(c, m) for c, m in obj["terms"]], nvars)

    def to_json(self):
        return {"terms": [[c, list(m)] for m, c in self.coeffs.items()]}

    def terms(self):
        return [(c, m) for m, c in self.coeffs.items()]

    @property
    def degree(self):
        return max((len(m) for m in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def is_linear(self):
        return self.degree <= 1

    def with_nvars(self, n):
        return PolynomialSpec(self.terms(), n)

    def check_range(self, n):
        if any(m and max(m) >= n for m in self.coeffs):
            raise ValidationError(f"polynomial refers to a generator index >= {n}")

    def __add__(self, other):
        return PolynomialSpec(self.terms() + other.terms(), _nv(self, other))

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __mul__(self, other):
        if not isinstance(other, PolynomialSpec):
            return self.scaled(other)
        return PolynomialSpec(
            [(c1 * c2, m1 + m2) for m1, c1 in self.coeffs.items() for m2, c2 in other.coeffs.items()],
            _nv(self, other),
        )

    def scaled(self, c):
        return PolynomialSpec([(c * k, m) for m, k in self.coeffs.items()], self.nvars)

    def derivative(self, a):
        out = []
        for m, c in self.coeffs.items():
            k = m.count(a)
            if k:
                rest = list(m)
                rest.remove(a)
                out.append((c * k, rest))
        return PolynomialSpec(out, self.nvars)

    def __call__(self, x):
        """Commutative evaluation; ``x`` has the variables on its last axis."""
        x = np.asarray(x)
        out = np.zeros(x.shape[:-1], dtype=np.result_type(x.dtype, float))
        for m, c in self.coeffs.items():
            term = np.full(x.shape[:-1], c, dtype=out.dtype)
            for a in m:
                term = term * x[..., a]
            out = out + term
        return out

    def gradient(self, x):
        x = np.asarray(x)
        return np.stack([self.derivative(a)(x) for a in range(x.shape[-1])], axis=-1)

    def operator(self, mats):
        """Ordering-averaged operator ``sum_k c_k sym(prod X_a)``."""
        mats = [np.asarray(m) for m in mats]
        self.check_range(len(mats))
        dim = mats[0].shape[0]
        eye = np.eye(dim, dtype=complex)
        out = np.zeros((dim, dim), dtype=complex)
        for m, c in self.coeffs.items():
            orders = set(itertools.permutations(m))
            acc = np.zeros_like(out)
            for order in orders:
                prod = eye
                for a in order:
                    prod = prod @ mats[a]
                acc += prod
            out += c * acc / len(orders)
        return symmetrize(out)

    def __eq__(self, other):
        return isinstance(other, PolynomialSpec) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "PolynomialSpec(0)"
        parts = [f"{c:g}" + "".join(f"*x{a}" for a in m) for m, c in self.coeffs.items()]
        return "PolynomialSpec(" + " + ".join(parts) + ")"


def _nv(p, q):
    return max(p.nvars, q.nvars)


def lie_poisson_bracket(f, g, structure):
    """Bracket on the dual of a Lie algebra.

    ``structure[a, b, d]`` holds ``c`` with ``{x_a, x_b} = sum_d c[a,b,d] x_d``;
    extended to polynomials by the Leibniz rule.
    """
    n = structure.shape[0]
    out = PolynomialSpec([], n)
    for a in range(n):
        da = f.derivative(a)
        if da.is_zero():
            continue
        for b in range(n):
            db = g.derivative(b)
            if db.is_zero():
                continue
            lin = PolynomialSpec([(structure[a, b, d], (d,)) for d in range(n) if structure[a, b, d] != 0], n)
            out = out + da * db * lin
    return out
