"""Homogeneous mean-field dynamics in the permutation-symmetric sector.

States of ``L`` bosonic ``M``-level systems live in ``Sym^L(C^M)``, indexed
by occupation tuples.  A mean-field Hamiltonian is ``H_L = L * H(X_1, ...)``
with ``X_a = (1/L) sum_j A_a^(j)`` the scaled collective generators.  Its
classical counterpart is the Hartree flow ``i psi' = h_eff(psi) psi`` on
single-particle states, with ``h_eff = sum_a (dH/dx_a)(<A>_psi) A_a``.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .numerics import (
    Propagator,
    ValidationError,
    as_hermitian,
    commutator,
    hermitian_eig,
    symmetrize,
)
from .projective import PureState, as_state

MAX_INDEX = 2**63 - 1
ENERGY_DRIFT_TOL = 1e-8
DEFAULT_DT = 1e-3
MIN_DT = 1e-7


class IntegrationError(RuntimeError):
    """Classical integrator failed to reach the requested accuracy."""


def symmetric_dimension(M, L):
    """Dimension ``C(L+M-1, M-1)`` of ``Sym^L(C^M)``."""
    if M < 2:
        raise ValidationError("M must be >= 2")
    if L < 0:
        raise ValidationError("L must be >= 0")
    d = math.comb(L + M - 1, M - 1)
    if d > MAX_INDEX:
        raise OverflowError(f"symmetric sector dimension for M={M}, L={L} exceeds 64-bit indexing")
    return d


def _occupations(M, L):
    if M == 1:
        yield (L,)
        return
    for n in range(L, -1, -1):
        for rest in _occupations(M - 1, L - n):
            yield (n,) + rest


class OccupationBasis:
    """Occupation tuples ``(n_1, ..., n_M)`` with ``sum n = L``, in
    lexicographically descending order; ``(L, 0, ..., 0)`` comes first."""

    def __init__(self, M, L):
        self.dim = symmetric_dimension(M, L)
        self.M, self.L = M, L
        self.occupations = np.array(list(_occupations(M, L)), dtype=np.int64).reshape(self.dim, M)
        self._index = {tuple(o): k for k, o in enumerate(self.occupations.tolist())}

    def index(self, occ):
        return self._index[tuple(occ)]

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        return isinstance(other, OccupationBasis) and (self.M, self.L) == (other.M, other.L)

    def __hash__(self):
        return hash((self.M, self.L))

    def __repr__(self):
        return f"OccupationBasis(M={self.M}, L={self.L}, dim={self.dim})"

    def hopping(self, m, n):
        """Nonzero elements of ``a_m^dagger a_n`` as ``(rows, cols, values)``."""
        occ = self.occupations
        src = np.nonzero(occ[:, n] > 0)[0]
        if m == n:
            return src, src, occ[src, n].astype(float)
        tgt_occ = occ[src].copy()
        tgt_occ[:, n] -= 1
        tgt_occ[:, m] += 1
        rows = np.array([self._index[tuple(o)] for o in tgt_occ.tolist()], dtype=np.int64)
        vals = np.sqrt(occ[src, n] * (occ[src, m] + 1.0))
        return rows, src, vals


@lru_cache(maxsize=64)
def occupation_basis(M, L):
    return OccupationBasis(M, L)


@dataclass(frozen=True)
class SymmetricState:
    basis: OccupationBasis
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.basis.dim,):
            raise ValidationError(f"expected {self.basis.dim} coefficients, got {c.shape}")
        if abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise ValidationError("symmetric state is not normalized")
        object.__setattr__(self, "coefficients", c)

    def state(self):
        return PureState(self.coefficients)


def product_state(psi, L):
    """``otimes^L psi`` in the occupation basis.

    The amplitude on ``n`` is ``sqrt(L! / prod n_m!) * prod psi_m^{n_m}``,
    evaluated in log-magnitude form so large ``L`` neither overflows nor
    underflows prematurely.
    """
    psi = as_state(psi).amplitudes
    basis = occupation_basis(len(psi), L)
    occ = basis.occupations
    lg = 0.5 * (math.lgamma(L + 1) - np.sum([[math.lgamma(k + 1) for k in row] for row in occ], axis=1))
    mod = np.abs(psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmod = np.log(mod)
        logs = np.where(occ > 0, occ * logmod[None, :], 0.0).sum(axis=1)
    phase = (occ * np.angle(psi)[None, :]).sum(axis=1)
    c = np.exp(lg + logs) * np.exp(1j * phase)
    # renormalize away the rounding of the multinomial sum
    return SymmetricState(basis, c / np.linalg.norm(c))


def collective_matrix(a, basis):
    """``S_A = sum_{mn} A_mn a_m^dagger a_n`` on the symmetric sector."""
    a = as_hermitian(a, "single-particle operator")
    if a.shape[0] != basis.M:
        raise ValidationError(f"operator is {a.shape[0]}x{a.shape[0]}, basis has M={basis.M}")
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for m in range(basis.M):
        for n in range(basis.M):
            if a[m, n] != 0:
                rows, cols, vals = basis.hopping(m, n)
                out[rows, cols] += a[m, n] * vals
    return symmetrize(out)


def one_body_density(state):
    """``rho_mn = <a_n^dagger a_m>``; trace equals ``L``."""
    basis, c = state.basis, state.coefficients
    rho = np.zeros((basis.M, basis.M), dtype=complex)
    for m in range(basis.M):
        for n in range(basis.M):
            rows, cols, vals = basis.hopping(n, m)
            rho[m, n] = np.sum(c[rows].conj() * vals * c[cols])
    return symmetrize(rho)


# -- generator sets -------------------------------------------------------

def spin_half_generators():
    """``sigma_x/2, sigma_y/2, sigma_z/2``."""
    return [
        np.array([[0, 0.5], [0.5, 0]], dtype=complex),
        np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
        np.array([[0.5, 0], [0, -0.5]], dtype=complex),
    ]


def gell_mann_generators(M):
    """Generalized Gell-Mann matrices divided by two (``M^2 - 1`` of them)."""
    out = []
    for j in range(M):
        for k in range(j + 1, M):
            s = np.zeros((M, M), dtype=complex)
            s[j, k] = s[k, j] = 0.5
            out.append(s)
            a = np.zeros((M, M), dtype=complex)
            a[j, k], a[k, j] = -0.5j, 0.5j
            out.append(a)
    for l in range(1, M):
        d = np.zeros(M)
        d[:l] = 1.0
        d[l] = -l
        out.append(np.diag(d * 0.5 * math.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return out


class CollectiveAlgebra:
    """Hermitian single-particle generators ``A_a`` closed under commutation.

    ``structure[a, b, d]`` holds ``c`` in ``[A_a, A_b] = i sum_d c_ab^d A_d``.
    """

    def __init__(self, generators, tol=1e-10):
        gens = [as_hermitian(g, f"generator {k}") for k, g in enumerate(generators)]
        if not gens:
            raise ValidationError("algebra needs at least one generator")
        M = gens[0].shape[0]
        if any(g.shape != (M, M) for g in gens):
            raise ValidationError("generators have inconsistent sizes")
        if M < 2:
            raise ValidationError("M must be >= 2")
        self.M = M
        self.generators = gens
        n = len(gens)
        basis = np.stack([g.reshape(-1) for g in gens], axis=1)
        self.structure = np.zeros((n, n, n))
        for a in range(n):
            for b in range(n):
                target = (-1j * commutator(gens[a], gens[b])).reshape(-1)
                coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
                resid = np.max(np.abs(basis @ coef - target)) if target.size else 0.0
                if resid > tol or np.max(np.abs(coef.imag)) > tol:
                    raise ValidationError(
                        f"generators are not closed under commutation ([A_{a}, A_{b}] residual {resid:.2e})"
                    )
                self.structure[a, b] = coef.real
        self._stack = np.stack(gens)

    @classmethod
    def named(cls, name, M):
        if name == "spin-half":
            if M != 2:
                raise ValidationError("the spin-half generator set requires M = 2")
            return cls(spin_half_generators())
        if name == "gell-mann":
            return cls(gell_mann_generators(M))
        raise ValidationError(f"unknown generator set {name!r}")

    @classmethod
    def default(cls, M):
        return cls.named("spin-half" if M == 2 else "gell-mann", M)

    def __len__(self):
        return len(self.generators)

    def classical_structure(self):
        """``{x_a, x_b} = sum_d s[a,b,d] x_d`` on the orbit (``s = -c``)."""
        return -self.structure

    def expectations(self, psi):
        """``x_a = <psi|A_a|psi>`` for a single-particle vector (or stack)."""
        psi = np.asarray(psi)
        return np.einsum("...i,aij,...j->...a", psi.conj(), self._stack, psi).real

    def effective(self, grad):
        return np.tensordot(grad, self._stack, axes=(0, 0))

    def scaled_collective(self, basis):
        return [collective_matrix(g, basis) / basis.L for g in self.generators]


def hamiltonian_matrix(poly, alg, basis):
    """``H_L = L * H(X_1, ..., X_n)`` with ordering-averaged monomials."""
    poly.check_range(len(alg))
    if basis.M != alg.M:
        raise ValidationError(f"basis has M={basis.M}, algebra has M={alg.M}")
    if basis.L < 1:
        raise ValidationError("L must be >= 1")
    return basis.L * poly.operator(alg.scaled_collective(basis))


def quantum_evolve(state, h, t):
    """``exp(-i t H_L) Phi``."""
    c = state.coefficients if isinstance(state, SymmetricState) else np.asarray(state, dtype=complex)
    h = as_hermitian(h, "H_L")
    if h.shape[0] != c.shape[0]:
        raise ValidationError(f"dimension mismatch: H_L is {h.shape[0]}, state has {c.shape[0]}")
    out = Propagator(h)(t, c)
    if isinstance(state, SymmetricState):
        return SymmetricState(state.basis, out / np.linalg.norm(out))
    return out


# -- classical Hartree flow --------------------------------------------------

class HartreeField:
    """``h_eff(psi)`` and the classical energy for a fixed ``(H, algebra)``."""

    def __init__(self, poly, alg):
        poly.check_range(len(alg))
        self.poly, self.alg = poly, alg
        self._derivs = [poly.derivative(a) for a in range(len(alg))]

    def energy(self, psi):
        return float(self.poly(self.alg.expectations(psi)))

    def h_eff(self, psi):
        x = self.alg.expectations(psi)
        grad = np.array([d(x) for d in self._derivs], dtype=float)
        return self.alg.effective(grad)

    def rhs(self, psi):
        return -1j * (self.h_eff(psi) @ psi)


def _rk4_segment(hf, psi, span, dt):
    n = max(1, int(math.ceil(span / dt - 1e-12)))
    h = span / n
    f = hf.rhs
    for _ in range(n):
        k1 = f(psi)
        k2 = f(psi + 0.5 * h * k1)
        k3 = f(psi + 0.5 * h * k2)
        k4 = f(psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        psi = psi / np.linalg.norm(psi)
    return psi


def classical_flow(psi0, poly, alg, t_grid, dt=DEFAULT_DT, drift_tol=ENERGY_DRIFT_TOL):
    """Hartree trajectory sampled on ``t_grid`` (starting at ``t_grid[0]``).

    Classic RK4 with renormalization after every step.  The step is halved
    until the energy drift over the run stays below ``drift_tol``.
    """
    psi0 = as_state(psi0).amplitudes.copy()
    if psi0.shape[0] != alg.M:
        raise ValidationError(f"initial state has dim {psi0.shape[0]}, algebra has M={alg.M}")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be a non-empty strictly increasing sequence")
    hf = HartreeField(poly, alg)
    e0 = hf.energy(psi0)
    while True:
        out = [psi0]
        psi = psi0
        for a, b in zip(t_grid[:-1], t_grid[1:]):
            psi = _rk4_segment(hf, psi, b - a, dt)
            out.append(psi)
        drift = max(abs(hf.energy(p) - e0) for p in out)
        if drift < drift_tol:
            return [PureState.from_vector(p) for p in out]
        dt *= 0.5
        if dt < MIN_DT:
            raise IntegrationError(f"energy drift {drift:.3e} not below {drift_tol:.1e} at dt={2 * dt:.3e}")


# -- fidelity diagnostic -------------------------------------------------------

@dataclass
class Trajectory:
    L: int
    times: np.ndarray
    classical_states: list
    fidelity: np.ndarray
    quantum_expectations: np.ndarray
    classical_expectations: np.ndarray
    energy: np.ndarray

    def sup_expectation_error(self, t_max=None):
        mask = np.ones_like(self.times, dtype=bool) if t_max is None else self.times <= t_max + 1e-12
        return float(np.max(np.abs(self.quantum_expectations[mask] - self.classical_expectations[mask])))


def fidelity_trajectory(psi0, poly, alg, L, t_grid, classical=None, dt=DEFAULT_DT):
    """Compare the exact ``L``-body evolution of ``otimes^L psi0`` with the
    product state built on the classical trajectory.

    ``F(t) = |<Phi_L(t)| otimes^L psi(t)>|^2``.  A precomputed classical
    trajectory on the same ``t_grid`` may be passed in to share it across L.
    """
    psi0 = as_state(psi0)
    t_grid = np.asarray(t_grid, dtype=float)
    if classical is None:
        classical = classical_flow(psi0, poly, alg, t_grid, dt=dt)
    if len(classical) != len(t_grid):
        raise ValidationError("classical trajectory and t_grid differ in length")
    basis = occupation_basis(alg.M, L)
    xs = alg.scaled_collective(basis)
    prop = Propagator(L * poly.operator(xs))
    phi0 = product_state(psi0, L).coefficients
    hf = HartreeField(poly, alg)
    fid, xq, xc, en = [], [], [], []
    for t, psi_t in zip(t_grid, classical):
        phi = prop(t - t_grid[0], phi0)
        prod = product_state(psi_t, L).coefficients
        fid.append(min(max(abs(np.vdot(phi, prod)) ** 2, 0.0), 1.0))
        xq.append([np.vdot(phi, x @ phi).real for x in xs])
        xc.append(alg.expectations(psi_t.amplitudes))
        en.append(hf.energy(psi_t.amplitudes))
    return Trajectory(
        L=L,
        times=t_grid,
        classical_states=list(classical),
        fidelity=np.array(fid),
        quantum_expectations=np.array(xq),
        classical_expectations=np.array(xc),
        energy=np.array(en),
    )


# -- ground states ----------------------------------------------------------------

@dataclass
class GroundStateReport:
    L: int
    quantum_point: np.ndarray
    classical_minimizers: list
    classical_energy: float
    quantum_energy_density: float
    gap: float
    degenerate: bool
    distance: float
    distances: list = field(default_factory=list)


def _bloch_vector(theta, phi):
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def _energy_and_grad(hf):
    M = hf.alg.M

    def fun(r):
        v = r[:M] + 1j * r[M:]
        n2 = float(np.vdot(v, v).real)
        u = v / math.sqrt(n2)
        e = hf.energy(u)
        he = hf.h_eff(u)
        w = (he @ v - np.vdot(u, he @ u).real * v) / n2
        return e, np.concatenate([2 * w.real, 2 * w.imag])

    return fun


def classical_minimizers(poly, alg, seed=0, n_random=2000, tol=1e-9):
    """Global minimizers of ``h(psi) = H(<A>_psi)`` over single-particle rays.

    Coarse search (an angle grid for ``M = 2``, seeded random rays otherwise)
    followed by BFGS refinement of the best candidates.  Returns the list of
    distinct minimizing generator points and the minimum value.
    """
    hf = HartreeField(poly, alg)
    M = alg.M
    if M == 2:
        cands = [_bloch_vector(t, p) for t in np.linspace(0, math.pi, 61) for p in np.linspace(0, 2 * math.pi, 120, endpoint=False)]
    else:
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(n_random, M)) + 1j * rng.normal(size=(n_random, M))
        cands = list(raw / np.linalg.norm(raw, axis=1)[:, None])
    energies = np.array([hf.energy(c) for c in cands])
    order = np.argsort(energies, kind="stable")[:24]
    fun = _energy_and_grad(hf)
    refined = []
    for k in order:
        c = cands[k]
        res = minimize(fun, np.concatenate([c.real, c.imag]), jac=True, method="BFGS", options={"gtol": 1e-13, "maxiter": 2000})
        v = res.x[:M] + 1j * res.x[M:]
        v /= np.linalg.norm(v)
        refined.append((hf.energy(v), alg.expectations(v)))
    emin = min(e for e, _ in refined)
    points = []
    for e, x in sorted(refined, key=lambda p: p[0]):
        if e <= emin + tol and all(np.linalg.norm(x - y) > 1e-6 for y in points):
            points.append(x)
    points.sort(key=lambda x: tuple(-x))
    return points, emin


def ground_state_correspondence(poly, alg, L, seed=0, minimizers=None):
    """Quantum ground state of ``H_L`` versus classical minimizers of ``H``.

    The quantum side is reported through the generator expectations
    ``<X_a>`` of the lowest eigenvector; ``distance`` is the Euclidean
    distance to the nearest classical minimizer.
    """
    basis = occupation_basis(alg.M, L)
    xs = alg.scaled_collective(basis)
    h = L * poly.operator(xs)
    w, v = hermitian_eig(h)
    g = v[:, -1]
    gap = float(w[-2] - w[-1]) if len(w) > 1 else math.inf
    xq = np.array([np.vdot(g, x @ g).real for x in xs])
    if minimizers is None:
        minimizers = classical_minimizers(poly, alg, seed=seed)
    points, emin = minimizers
    dists = [float(np.linalg.norm(xq - p)) for p in points]
    scale = max(1.0, float(np.max(np.abs(w))))
    return GroundStateReport(
        L=L,
        quantum_point=xq,
        classical_minimizers=points,
        classical_energy=emin,
        quantum_energy_density=float(w[-1] / L),
        gap=gap,
        degenerate=gap < 1e-8 * scale or len(points) > 1,
        distance=min(dists),
        distances=dists,
    )
