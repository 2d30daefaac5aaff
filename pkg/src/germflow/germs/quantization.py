"""Coherent-state quantization on the sphere and its classical-limit residuals.

``Q_j(f) = (2j+1) * integral dOmega/4pi f(n) |n><n|`` is evaluated with a
tensor rule: Gauss-Legendre in ``cos(theta)`` times the trapezoid rule in
``phi``.  For polynomial ``f`` every matrix element is a polynomial on the
sphere, so the rule is exact once its order covers the degree.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..numerics import ValidationError, anticommutator, operator_norm, symmetrize
from ..polynomial import PolynomialSpec, lie_poisson_bracket
from ..projective import hbar_commutator
from .families import SpinSU2
from .limits import ResidualReport, SemiclassicalSchedule

_SU2 = SpinSU2()


class QuadratureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes on the unit sphere with weights summing to one.

    ``exact_degree`` is the largest total polynomial degree (in Cartesian
    coordinates) integrated exactly.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12 or np.any(self.weights <= 0):
            raise ValidationError("quadrature weights must be positive and sum to 1")

    @property
    def size(self):
        return self.weights.shape[0]

    def vectors(self):
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=-1)

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


def sphere_rule(n_theta, n_phi):
    u, w = leggauss(n_theta)
    theta = np.arccos(u)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(w / 2.0, np.full(n_phi, 1.0 / n_phi))
    weights = ww.ravel()
    weights = weights / weights.sum()
    return QuadratureRule(tt.ravel(), pp.ravel(), weights, min(2 * n_theta - 1, n_phi - 1))


def default_rule(L, degree=2):
    """Rule exact for ``Q_j`` of polynomials up to ``degree`` at spin ``L/2``.

    At least ``2j + 2`` Gauss-Legendre nodes and ``4j + 4`` azimuthal nodes.
    """
    need = L + degree
    n_theta = max(L + 2, (need + 2) // 2)
    n_phi = max(2 * L + 4, need + 1)
    return sphere_rule(n_theta, n_phi)


def _values(f, rule):
    vec = rule.vectors()
    if isinstance(f, PolynomialSpec):
        return np.asarray(f(vec), dtype=float)
    vals = np.asarray(f(vec), dtype=float)
    if vals.ndim == 0:
        vals = np.full(rule.size, float(vals))
    return vals


def coherent_states(L, rule):
    """Rows are the spin coherent states at the rule's nodes."""
    k = np.arange(L + 1)
    m = L / 2.0 - k
    lbin = 0.5 * np.array([math.lgamma(L + 1) - math.lgamma(i + 1) - math.lgamma(L - i + 1) for i in k])
    c = np.cos(rule.theta / 2)[:, None]
    s = np.sin(rule.theta / 2)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        lc, ls = np.log(np.abs(c)), np.log(np.abs(s))
        logmag = lbin[None, :] + np.where(L - k > 0, (L - k) * lc, 0.0) + np.where(k > 0, k * ls, 0.0)
    return np.exp(logmag) * np.exp(-1j * m[None, :] * rule.phi[:, None])


def quantize_sphere(f, L, rule=None, degree=None):
    """Berezin-type quantization ``Q_j(f)`` at spin ``j = L/2``.

    ``f`` is a :class:`PolynomialSpec` in ``(x_1, x_2, x_3)`` or a callable
    taking an ``(N, 3)`` array of unit vectors.  Emits a
    :class:`QuadratureWarning` when the rule is known to be too coarse.
    """
    if int(L) != L or L < 1:
        raise ValidationError("L must be a positive integer")
    L = int(L)
    if degree is None and isinstance(f, PolynomialSpec):
        degree = f.degree
    if rule is None:
        rule = default_rule(L, degree if degree is not None else 2)
    if degree is not None and L + degree > rule.exact_degree:
        warnings.warn(
            f"quadrature exact to degree {rule.exact_degree}, integrand needs {L + degree}",
            QuadratureWarning,
            stacklevel=2,
        )
    states = coherent_states(L, rule)
    vals = _values(f, rule) * rule.weights * (L + 1)
    q = (states.T * vals) @ states.conj()
    return symmetrize(q)


def sphere_bracket(f, g):
    """Classical bracket on the unit sphere, ``{x_a, x_b} = -eps_abc x_c``."""
    return lie_poisson_bracket(f.with_nvars(3), g.with_nvars(3), _SU2.classical_structure())


def _sched(sched):
    return sched if isinstance(sched, SemiclassicalSchedule) else SemiclassicalSchedule(sched)


def dirac_residual(f, g, sched):
    """``|| [Q(f), Q(g)]_hbar - Q({f, g}) ||`` along the schedule (operator norm)."""
    sched = _sched(sched)
    fg = sphere_bracket(f, g)
    deg = max(f.degree, g.degree, fg.degree)
    rows = []
    for L in sched.L_values:
        rule = default_rule(L, deg)
        hbar = _SU2.hbar(L)
        qf, qg, qb = (quantize_sphere(h, L, rule) for h in (f, g, fg))
        rows.append((L, hbar, operator_norm(symmetrize(hbar_commutator(qf, qg, hbar)) - qb)))
    return ResidualReport.from_rows("dirac", rows)


def vonneumann_residual(f, g, sched):
    """``|| Q(f) o Q(g) - Q(fg) ||`` along the schedule (operator norm)."""
    sched = _sched(sched)
    fg = f.with_nvars(3) * g.with_nvars(3)
    rows = []
    for L in sched.L_values:
        rule = default_rule(L, fg.degree)
        qf, qg, qp = (quantize_sphere(h, L, rule) for h in (f, g, fg))
        rows.append((L, _SU2.hbar(L), operator_norm(anticommutator(qf, qg) - qp)))
    return ResidualReport.from_rows("von_neumann", rows)
