"""Pure-state compatibility for n qubits.

A margin vector (lowest local eigenvalues) comes from an n-qubit pure state
iff every entry is at most the sum of the others.  Positive answers are
witnessed by even pure states (amplitudes only on even-weight bit strings),
built as mixtures of the cube vertices in ``V*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import ConstructionError, ContractViolation, DimensionError, MembershipError
from .linalg import PureState, apply_local, reduced_state
from .numerics.simplex import lp_feasible
from .spectra import QubitMarginVector
from .tolerances import DEFAULT_TOL, Tolerances

MAX_VSTAR_N = 20


def _margins(lam):
    if isinstance(lam, QubitMarginVector):
        return lam.array()
    return QubitMarginVector(lam).array()


def result1_slack(lam) -> np.ndarray:
    """``sum_{j != i} lam_j - lam_i`` for every i; negative entries are violations."""
    v = _margins(lam)
    return v.sum() - 2 * v


def check_pure_compat_qubits(lam, tol: Tolerances = DEFAULT_TOL) -> bool:
    return bool(np.all(result1_slack(lam) >= -tol.maj))


@dataclass(frozen=True)
class VStarVertex:
    """Cube vertex with coordinates in {0, 1/2}; ``halves`` marks the 1/2 entries."""

    halves: tuple

    def __post_init__(self):
        h = tuple(bool(x) for x in self.halves)
        if sum(h) == 1:
            raise ContractViolation("a vertex with exactly one 1/2 entry is not in V*")
        object.__setattr__(self, "halves", h)

    @property
    def n(self) -> int:
        return len(self.halves)

    def array(self) -> np.ndarray:
        return 0.5 * np.array(self.halves, dtype=float)

    def __str__(self):
        return "(" + ",".join("1/2" if h else "0" for h in self.halves) + ")"


@dataclass(frozen=True)
class VertexCombination:
    terms: tuple  # of (weight, VStarVertex)

    def point(self) -> np.ndarray:
        return sum(w * v.array() for w, v in self.terms)


def enumerate_vstar(n: int) -> list:
    """All ``2**n - n`` vertices of the cube [0, 1/2]^n that satisfy result1."""
    if not 2 <= n <= MAX_VSTAR_N:
        raise ContractViolation(f"n must lie in [2, {MAX_VSTAR_N}], got {n}")
    return [VStarVertex(bits) for bits in product((False, True), repeat=n) if sum(bits) != 1]


def project_onto_region(lam, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Pull a margin vector violating result1 by at most ``tol.boundary`` onto the boundary."""
    v = _margins(lam).copy()
    i = int(np.argmax(v))
    rest = v.sum() - v[i]
    excess = v[i] - rest
    if excess > tol.boundary:
        raise MembershipError(
            f"margin {i} exceeds the sum of the others by {excess:.3g}"
        )
    if excess > 0:
        v[i] = rest  # only the largest entry can violate result1
    return v


def decompose_into_vstar(lam, tol: Tolerances = DEFAULT_TOL) -> VertexCombination:
    """Convex weights over ``V*`` reproducing ``lam`` (solved as an LP)."""
    v = project_onto_region(lam, tol)
    n = v.size
    verts = enumerate_vstar(n)
    cols = np.array([x.array() for x in verts]).T
    a_eq = np.vstack([cols, np.ones(len(verts))])
    b_eq = np.append(v, 1.0)
    w = lp_feasible(A_eq=a_eq, b_eq=b_eq)
    if w is None:
        raise MembershipError("margin vector is outside conv(V*)")
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    return VertexCombination(tuple((float(wi), verts[i]) for i, wi in enumerate(w) if wi > 0))


@dataclass(frozen=True)
class EpsAmplitudes:
    """Even pure state: amplitudes on even-weight bit strings of length ``n``."""

    n: int
    amps: dict  # bit string -> complex

    def __post_init__(self):
        amps = {}
        for x, c in dict(self.amps).items():
            if len(x) != self.n or set(x) - {"0", "1"}:
                raise ContractViolation(f"bad bit string {x!r} for n={self.n}")
            if x.count("1") % 2:
                raise ContractViolation(f"odd-weight string {x!r} in an even pure state")
            if c != 0:
                amps[x] = complex(c)
        norm2 = sum(abs(c) ** 2 for c in amps.values())
        if abs(norm2 - 1.0) > DEFAULT_TOL.tr:
            raise ContractViolation(f"amplitudes have squared norm {norm2:.12g}")
        object.__setattr__(self, "amps", amps)

    def to_pure_state(self) -> PureState:
        psi = np.zeros(2 ** self.n, dtype=complex)
        for x, c in self.amps.items():
            psi[int(x, 2)] = c
        return PureState(psi, (2,) * self.n)


def vertex_eps(v: VStarVertex) -> EpsAmplitudes:
    """Uniform even pure state on the 1/2-positions of ``v``; other qubits stay |0>."""
    pos = [i for i, h in enumerate(v.halves) if h]
    k = len(pos)
    if k == 0:
        return EpsAmplitudes(v.n, {"0" * v.n: 1.0})
    c = 2.0 ** (-(k - 1) / 2)
    amps = {}
    for r in range(0, k + 1, 2):
        for ones in combinations(pos, r):
            bits = ["0"] * v.n
            for i in ones:
                bits[i] = "1"
            amps["".join(bits)] = c
    return EpsAmplitudes(v.n, amps)


def mix_eps(states) -> EpsAmplitudes:
    """``c_x = sqrt(sum_a w_a |c_{x,a}|^2)``; margins mix linearly with the weights."""
    states = list(states)
    if not states:
        raise ContractViolation("nothing to mix")
    n = states[0][1].n
    w = np.array([s[0] for s in states], dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > DEFAULT_TOL.tr:
        raise ContractViolation("mixing weights must be a probability vector")
    probs = {}
    for wi, e in states:
        if e.n != n:
            raise DimensionError("cannot mix even pure states of different sizes")
        for x, c in e.amps.items():
            probs[x] = probs.get(x, 0.0) + wi * abs(c) ** 2
    total = sum(probs.values())
    return EpsAmplitudes(n, {x: np.sqrt(p / total) for x, p in probs.items()})


@dataclass(frozen=True)
class EpsMarginals:
    """Raw ``<1|rho_i|1>`` per qubit and the qubits where it exceeds ``<0|rho_i|0>``.

    When ``breached`` is empty the raw values are the lowest eigenvalues.
    """

    ones: tuple
    breached: tuple

    @property
    def ok(self) -> bool:
        return not self.breached

    def vector(self) -> QubitMarginVector:
        if self.breached:
            raise ContractViolation(
                f"qubits {list(self.breached)} have <1|rho|1> > <0|rho|0>; not in standard form"
            )
        return QubitMarginVector(self.ones)

    def lowest(self) -> QubitMarginVector:
        """Lowest eigenvalues regardless of the convention."""
        v = np.array(self.ones)
        return QubitMarginVector(np.minimum(v, 1 - v))


def eps_marginals(e: EpsAmplitudes) -> EpsMarginals:
    ones = np.zeros(e.n)
    for x, c in e.amps.items():
        p = abs(c) ** 2
        for i, b in enumerate(x):
            if b == "1":
                ones[i] += p
    breached = tuple(int(i) for i in np.flatnonzero(ones > 0.5 + DEFAULT_TOL.tr))
    return EpsMarginals(tuple(float(x) for x in ones), breached)


def qubit_margins(psi: PureState) -> np.ndarray:
    """Lowest eigenvalue of each single-qubit marginal of ``psi``."""
    n = len(psi.dims)
    t = psi.amplitudes.reshape(psi.dims)
    out = np.empty(n)
    for i in range(n):
        m = np.moveaxis(t, i, 0).reshape(2, -1)
        r = m @ m.conj().T
        # lowest eigenvalue of a 2x2 Hermitian unit-trace matrix
        gap = np.sqrt((r[0, 0].real - r[1, 1].real) ** 2 + 4 * abs(r[0, 1]) ** 2)
        out[i] = 0.5 * (1.0 - gap)
    return np.clip(out, 0.0, 0.5)


def witness_pure_qubits(lam, targets=None, tol: Tolerances = DEFAULT_TOL) -> PureState:
    """n-qubit pure state whose i-th marginal has lowest eigenvalue ``lam[i]``.

    With ``targets`` (the unitaries ``U_i`` returned by ``standard_form``)
    the marginals are rotated back to the original ``rho_i = U_i^dagger
    diag(1 - lam_i, lam_i) U_i``.
    """
    v = _margins(lam)
    if not check_pure_compat_qubits(v, tol.with_overrides(maj=max(tol.maj, tol.boundary))):
        raise MembershipError("margin vector violates the pure-state inequalities")
    combo = decompose_into_vstar(v, tol)
    eps = mix_eps([(w, vertex_eps(x)) for w, x in combo.terms])
    psi = eps.to_pure_state()
    if targets is not None:
        targets = list(targets)
        if len(targets) != v.size:
            raise DimensionError("need one target unitary per qubit")
        for i, u in enumerate(targets):
            psi = apply_local(psi, i, np.asarray(u, dtype=complex).conj().T)
    got = qubit_margins(psi)
    err = float(np.max(np.abs(got - v)))
    if err > 1e-8:
        raise ConstructionError(f"witness margins off by {err:.3g}")
    return psi


def local_marginals(psi: PureState):
    return [reduced_state(psi, [i]) for i in range(len(psi.dims))]


def margin_polytope(n: int):
    """``(A, b)`` with ``A x <= b`` describing ``0 <= x_i <= 1/2`` and result1."""
    eye = np.eye(n)
    result1 = 2 * eye - np.ones((n, n))  # x_i - sum_{j != i} x_j <= 0
    a = np.vstack([-eye, eye, result1])
    b = np.concatenate([np.zeros(n), np.full(n, 0.5), np.zeros(n)])
    return a, b
