"""Semiclassical sequences: delta limits, germ equivalence, pullbacks,
funnel limits and the state-space form of Dirac's condition."""

from dataclasses import dataclass, field

import numpy as np

from ..numerics import ValidationError, as_hermitian
from ..polynomial import PolynomialSpec
from ..projective import expectation, hbar_commutator, transition_probability
from .families import BosonicUM, HeisenbergGauss, SpinSU2, levi_civita


@dataclass(frozen=True)
class SemiclassicalSchedule:
    """Strictly increasing positive integers ``L``; ``hbar`` follows per family."""

    L_values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.L_values)
        if not vals:
            raise ValidationError("schedule.L_values must be non-empty")
        if any(v != w for v, w in zip(vals, self.L_values)) or vals[0] < 1:
            raise ValidationError("schedule.L_values must be positive integers")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValidationError("schedule.L_values must be strictly increasing")
        object.__setattr__(self, "L_values", vals)

    def __iter__(self):
        return iter(self.L_values)

    def __len__(self):
        return len(self.L_values)

    def hbar_values(self, g=None):
        if g is None:
            return [1.0 / L for L in self.L_values]
        return [g.hbar(L) for L in self.L_values]


def fit_exponent(hbars, values):
    """Least-squares slope of ``log value`` against ``log hbar``.

    ``None`` when fewer than two points or any value is not positive.
    """
    hbars, values = np.asarray(hbars, float), np.asarray(values, float)
    if len(values) < 2 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        return None
    slope, _ = np.polyfit(np.log(hbars), np.log(values), 1)
    return float(slope)


@dataclass
class ResidualReport:
    """Rows ``(L, hbar, value)`` ordered by ``L`` plus a fitted power law."""

    kind: str
    rows: list
    exponent: float = None
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_rows(cls, kind, rows, **extras):
        rows = sorted(rows, key=lambda r: r[0])
        exponent = fit_exponent([r[1] for r in rows], [r[2] for r in rows])
        return cls(kind, rows, exponent, dict(extras))

    @property
    def values(self):
        return np.array([r[2] for r in self.rows])

    @property
    def L_values(self):
        return [r[0] for r in self.rows]

    def strictly_decreasing(self):
        v = self.values
        return bool(np.all(np.diff(v) < 0))

    def ratios(self):
        """``value(L_{k+1}) / value(L_k)``."""
        v = self.values
        with np.errstate(divide="ignore", invalid="ignore"):
            return v[1:] / v[:-1]


def _sched(sched):
    return sched if isinstance(sched, SemiclassicalSchedule) else SemiclassicalSchedule(sched)


def germ_delta_limit(g, x, y, sched):
    """``p(q_hbar(x), q_hbar(y))`` along the schedule.

    For ``x != y`` the decay is geometric in ``L``; ``extras['rate']`` holds
    the fitted ``-d log p / dL``.
    """
    sched = _sched(sched)
    rows = [(L, g.hbar(L), g.overlap(L, x, y)) for L in sched]
    vals = np.array([r[2] for r in rows])
    rate = None
    if len(rows) > 1 and np.all(vals > 0):
        rate = float(-np.polyfit([r[0] for r in rows], np.log(vals), 1)[0])
    same = bool(np.all(np.abs(vals - 1.0) < 1e-12))
    monotone = same or bool(np.all(np.diff(vals) < 0))
    return ResidualReport.from_rows("delta_limit", rows, rate=rate, same_point=same, monotone=monotone)


@dataclass
class EquivalenceReport:
    overlaps: list  # one ResidualReport per point
    equivalent: list

    @property
    def all_equivalent(self):
        return all(self.equivalent)


def _explicit_overlap(g, L, x, y, phase):
    if isinstance(g, HeisenbergGauss):
        # closed form; a global phase cannot change it
        return g.overlap(L, x, y)
    a = g.state(L, x).amplitudes
    b = np.exp(1j * phase) * g.state(L, y).amplitudes
    return transition_probability(a, b)


def germ_equivalence(g, points, sched, transform=None, phase=None, tol=1e-3):
    """Compare ``q_hbar`` with ``q'_hbar(x) = exp(i phase(L, x)) q_hbar(transform(L, x))``.

    A point counts as equivalent when ``1 - p`` is non-increasing along the
    schedule and ends below ``tol``.
    """
    sched = _sched(sched)
    transform = transform or (lambda L, x: x)
    phase = phase or (lambda L, x: 0.0)
    reports, verdicts = [], []
    for x in points:
        rows = []
        for L in sched:
            rows.append((L, g.hbar(L), _explicit_overlap(g, L, x, transform(L, x), phase(L, x))))
        rep = ResidualReport.from_rows("equivalence", rows)
        defect = 1.0 - rep.values
        ok = bool(defect[-1] < tol and np.all(np.diff(defect) <= 1e-12))
        rep.extras["equivalent"] = ok
        reports.append(rep)
        verdicts.append(ok)
    return EquivalenceReport(reports, verdicts)


def _funnel_operator(a, g, L):
    a.check_range(g.nvars())
    return a.operator(g.generators(L))


def pullback(F, g, L):
    """``x -> F(q_hbar(x))``.

    ``F`` is a Hermitian matrix on the representation space, or a
    :class:`PolynomialSpec` read as the funnel ``a(X_1, ..., X_n)`` in the
    family's scaled generators (the only option for the Heisenberg family).
    """
    if isinstance(g, HeisenbergGauss):
        if not isinstance(F, PolynomialSpec):
            raise ValidationError("Heisenberg pullbacks take a polynomial in (p, q, z)")
        F.check_range(g.nvars())
        return lambda x: g.pullback_polynomial(F, L, x)
    op = _funnel_operator(F, g, L) if isinstance(F, PolynomialSpec) else as_hermitian(F, "observable")
    if op.shape[0] != g.dim(L):
        raise ValidationError(f"observable has dim {op.shape[0]}, representation has {g.dim(L)}")
    return lambda x: expectation(op, g.state(L, x))


@dataclass
class FunnelReport:
    report: ResidualReport  # rows: (L, hbar, |value - limit|)
    values: list
    limit: float


def funnel_limit(a, g, x, sched):
    """Pullbacks of ``A_hbar = a(X)`` at ``x`` and their limit ``a(x_cl)``."""
    sched = _sched(sched)
    limit = float(a(g.classical_coordinates(x)))
    values, rows = [], []
    for L in sched:
        v = pullback(a, g, L)(x)
        values.append(v)
        rows.append((L, g.hbar(L), abs(v - limit)))
    return FunnelReport(ResidualReport.from_rows("funnel", rows), values, limit)


def _sphere_like(g):
    if isinstance(g, SpinSU2):
        return True
    if isinstance(g, BosonicUM) and g.M == 2 and len(g.algebra) == 3:
        return np.allclose(g.classical_structure(), -levi_civita())
    return False


def classical_bracket_of_pullbacks(A, B, g, L, x):
    """``{q*A, q*B}(x)`` for rotation-covariant families, exactly.

    The derivative of a pullback along the rotation about axis ``a`` is
    ``u_a = <i[G_a, A]>`` (``G_a`` the rotation generator on the
    representation space), so with ``u, v`` for ``A, B`` the Lie-Poisson
    bracket ``s * x . (grad A x grad B)`` equals ``s * x . (u x v) / |x|^2``.
    """
    if not _sphere_like(g):
        raise ValidationError("pullback brackets are implemented for SU(2)-type germs only")
    psi = g.state(L, x).amplitudes
    gens = g.rotation_generators(L)

    def rot(op):
        return np.array([np.vdot(psi, 1j * (G @ op - op @ G) @ psi).real for G in gens])

    xc = g.classical_coordinates(x)
    s = g.classical_structure()[0, 1, 2]
    u, v = rot(A), rot(B)
    return float(s * (xc @ np.cross(u, v)) / (xc @ xc))


def bracket_residual(A, B, g, grid, sched):
    """``sup_x |q*[A_hbar, B_hbar]_hbar - {q*A_hbar, q*B_hbar}|`` along the schedule."""
    sched = _sched(sched)
    rows = []
    for L in sched:
        hbar = g.hbar(L)
        a_op, b_op = _funnel_operator(A, g, L), _funnel_operator(B, g, L)
        comm = hbar_commutator(a_op, b_op, hbar)
        comm = 0.5 * (comm + comm.conj().T)
        worst = 0.0
        for x in grid:
            quantum = expectation(comm, g.state(L, x))
            classical = classical_bracket_of_pullbacks(a_op, b_op, g, L, x)
            worst = max(worst, abs(quantum - classical))
        rows.append((L, hbar, worst))
    return ResidualReport.from_rows("bracket", rows)
