"""Two-qubit states with a fixed spectrum.

For a two-qubit state with spectrum lam_1 >= ... >= lam_4 the lowest
eigenvalues (la, lb) of its marginals are exactly the points satisfying

    la >= lam_3 + lam_4
    lb >= lam_3 + lam_4
    la + lb >= 2 lam_4 + lam_3 + lam_2
    |la - lb| <= min(lam_1 - lam_3, lam_2 - lam_4)

The feasible region is a convex octagon O-A-B-C-D-C'-B'-A' symmetric about
the diagonal.  Below the diagonal it is fanned into triangles OCD, OAB and
OBC, each covered by an explicit family of states.

Inside the half la >= lb it is convenient to use ``p = 1 - la - lb`` and
``q = la - lb``.  There the region reads

    0 <= q <= m,   q <= p <= lam_1 - lam_4,   p + q <= L

with ``m = min(lam_1 - lam_3, lam_2 - lam_4)`` and
``L = lam_1 + lam_2 - lam_3 - lam_4``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConstructionError, ContractViolation, DimensionError, MembershipError
from .linalg import DensityMatrix, PureState, Spectrum, apply_local, eig_hermitian, partial_trace, purify, spectrum
from .numerics.orbit import SWAP
from .spectra import standard_form
from .tolerances import DEFAULT_TOL, Tolerances

INEQUALITIES = (
    "lambda_A >= lambda_3 + lambda_4",
    "lambda_B >= lambda_3 + lambda_4",
    "lambda_A + lambda_B >= 2*lambda_4 + lambda_3 + lambda_2",
    "|lambda_A - lambda_B| <= min(lambda_1 - lambda_3, lambda_2 - lambda_4)",
)
FAMILIES = ("OCD", "OAB", "OBC")


def _spec4(lam, tol=DEFAULT_TOL) -> np.ndarray:
    s = lam if isinstance(lam, Spectrum) else Spectrum.of(lam, tol)
    if len(s) != 4:
        raise ContractViolation(f"two-qubit spectrum needs 4 values, got {len(s)}")
    return s.array()


@dataclass(frozen=True)
class TwoQubitQuery:
    la: float
    lb: float
    spectrum: Spectrum

    def __post_init__(self):
        for name in ("la", "lb"):
            v = float(getattr(self, name))
            if not -DEFAULT_TOL.boundary <= v <= 0.5 + DEFAULT_TOL.boundary:
                raise ContractViolation(f"{name}={v} outside [0, 1/2]")
            object.__setattr__(self, name, min(max(v, 0.0), 0.5))
        if not isinstance(self.spectrum, Spectrum):
            object.__setattr__(self, "spectrum", Spectrum.of(self.spectrum))
        _spec4(self.spectrum)


class RegionVertices(NamedTuple):
    O: tuple
    A: tuple
    B: tuple
    C: tuple
    D: tuple

    def polygon(self) -> list:
        """Boundary O, A, B, C, D and the mirror images C', B', A'."""
        lower = [self.O, self.A, self.B, self.C, self.D]
        return lower + [(y, x) for x, y in (self.C, self.B, self.A)]


@dataclass(frozen=True)
class WitnessParams:
    family: str
    alpha: float
    second: float  # beta for OCD/OAB, phi for OBC
    swapped: bool = False
    caseSwap: bool = False


def inequality_slacks(la, lb, lam) -> np.ndarray:
    """Left minus right side of each inequality; negative means violated."""
    l1, l2, l3, l4 = _spec4(lam)
    return np.array([
        la - (l3 + l4),
        lb - (l3 + l4),
        la + lb - (2 * l4 + l3 + l2),
        min(l1 - l3, l2 - l4) - abs(la - lb),
    ])


def two_qubit_violations(q: TwoQubitQuery, tol: Tolerances = DEFAULT_TOL) -> list:
    """``[(index, statement, amount), ...]`` for every violated inequality (1-based)."""
    s = inequality_slacks(q.la, q.lb, q.spectrum)
    return [(i + 1, INEQUALITIES[i], float(-s[i])) for i in range(4) if s[i] < -tol.maj]


def check_two_qubit(q: TwoQubitQuery, tol: Tolerances = DEFAULT_TOL) -> bool:
    return not two_qubit_violations(q, tol)


def region_vertices(lam) -> RegionVertices:
    l1, l2, l3, l4 = _spec4(lam)
    m = min(l1 - l3, l2 - l4)
    d = 0.5 * (2 * l4 + l3 + l2)
    return RegionVertices(
        O=(0.5, 0.5),
        A=(0.5, 0.5 - m),
        B=(min(l1 + l4, l2 + l3), l3 + l4),
        C=(l2 + l4, l3 + l4),
        D=(d, d),
    )


def region_json(lam) -> dict:
    v = region_vertices(lam)
    return {
        "lambda": [float(x) for x in _spec4(lam)],
        "vertices": {k: [float(x) for x in getattr(v, k)] for k in v._fields},
        "polygon": [[float(x), float(y)] for x, y in v.polygon()],
    }


def min_trace_fixed_spectrum(o_eigs, lam) -> float:
    """Smallest ``tr(O eta)`` over states ``eta`` with spectrum ``lam``.

    ``o_eigs`` are the eigenvalues of ``O`` in decreasing order; the minimum
    pairs the largest weight with the smallest eigenvalue.
    """
    o = np.asarray(o_eigs, dtype=float).ravel()
    if np.any(np.diff(o) > 0):
        raise ContractViolation("operator eigenvalues must be sorted in decreasing order")
    lam = lam.array() if isinstance(lam, Spectrum) else np.asarray(lam, dtype=float)
    if np.any(np.diff(lam) > 0):
        raise ContractViolation("spectrum must be sorted in decreasing order")
    if o.size != lam.size:
        raise DimensionError("operator and spectrum sizes differ")
    return float(np.dot(lam, o[::-1]))


def sup_F_bound(lam) -> float:
    l1, l2, l3, l4 = _spec4(lam)
    return 2.0 * min(l1 - l3, l2 - l4)


# --- explicit families -------------------------------------------------------

_K = np.eye(4)  # |00>, |01>, |10>, |11>


def _ket(a, b):
    return np.kron(a, b)


def _basis_ab(alpha, beta):
    s = np.sqrt
    r2 = s(2.0)
    p1 = (s(1 - alpha) * _K[0] + s(1 + alpha) * _K[3]) / r2
    p2 = (s(1 + alpha) * _K[0] - s(1 - alpha) * _K[3]) / r2
    p3 = (s(1 - beta) * _K[1] + s(1 + beta) * _K[2]) / r2
    p4 = (s(1 + beta) * _K[1] - s(1 - beta) * _K[2]) / r2
    return p1, p2, p3, p4


def _basis_phi(alpha, phi):
    s = np.sqrt
    r2 = s(2.0)
    e0, e1 = np.eye(2)
    f0 = np.cos(phi / 2) * e0 + np.sin(phi / 2) * e1
    f1 = -np.sin(phi / 2) * e0 + np.cos(phi / 2) * e1
    t1 = (s(1 - alpha) * _ket(e0, e0) + s(1 + alpha) * _ket(e1, e1)) / r2
    t2 = (s(1 + alpha) * _ket(f0, e0) - s(1 - alpha) * _ket(f1, e1)) / r2
    t3 = (s(1 - alpha) * _ket(f0, e1) + s(1 + alpha) * _ket(f1, e0)) / r2
    t4 = (s(1 + alpha) * _ket(e0, e1) - s(1 - alpha) * _ket(e1, e0)) / r2
    return t1, t2, t3, t4


def _assemble(lam, kets) -> np.ndarray:
    return sum(w * np.outer(k, k) for w, k in zip(lam, kets)).astype(complex)


def family_state(family: str, lam, alpha: float, second: float) -> np.ndarray:
    """4x4 matrix of the named family; eigenvalue ``lam_i`` sits on the listed ket."""
    lam = _spec4(lam)
    if not -1.0 <= alpha <= 1.0:
        raise ContractViolation(f"alpha={alpha} outside [-1, 1]")
    if family == "OCD":
        p1, p2, p3, p4 = _basis_ab(alpha, second)
        return _assemble(lam, (p1, p4, p3, p2))
    if family == "OAB":
        p1, p2, p3, p4 = _basis_ab(alpha, second)
        return _assemble(lam, (p1, p4, p2, p3))
    if family == "OBC":
        t1, t2, t3, t4 = _basis_phi(alpha, second)
        return _assemble(lam, (t1, t4, t3, t2))
    raise ContractViolation(f"unknown family {family!r}")


def family_margins(family: str, lam, alpha: float, second: float) -> tuple:
    """Closed-form lowest marginal eigenvalues (la, lb) of ``family_state``."""
    l1, l2, l3, l4 = _spec4(lam)
    if family in ("OCD", "OAB"):
        if family == "OCD":
            u, v = alpha * (l1 - l4), second * (l2 - l3)
        else:
            u, v = alpha * (l1 - l3), second * (l2 - l4)
        return 0.5 * (1 - abs(u - v)), 0.5 * (1 - abs(u + v))
    if family == "OBC":
        a, b = l1 - l2, l3 - l4
        r = np.sqrt(max(a * a + b * b + 2 * a * b * np.cos(second), 0.0))
        return 0.5 * (1 - abs(alpha) * r), 0.5 * (1 - abs(alpha) * (l1 + l2 - l3 - l4))
    raise ContractViolation(f"unknown family {family!r}")


def _solve_linear(p, q, cap_u, cap_v):
    """u = p, v = q (or the other way round) within the parameter caps.

    For u, v >= 0 the family margins give ``p = max(u, v)`` and
    ``q = min(u, v)``; ``p`` goes to the parameter with more room.
    Returns (alpha, beta) or None.
    """
    slack = 1e-12
    for u, v in ((p, q), (q, p)):
        if u <= cap_u + slack and v <= cap_v + slack:
            a = min(u / cap_u, 1.0) if cap_u > 0 else 0.0
            b = min(v / cap_v, 1.0) if cap_v > 0 else 0.0
            return a, b
    return None


def _invert(family, lam, p, q):
    l1, l2, l3, l4 = lam
    if family == "OCD":
        return _solve_linear(p, q, l1 - l4, l2 - l3)
    if family == "OAB":
        return _solve_linear(p, q, l1 - l3, l2 - l4)
    # OBC: p + q = |alpha| L and p - q = |alpha| r(phi)
    big = l1 + l2 - l3 - l4
    a, b = l1 - l2, l3 - l4
    if p + q <= 0:
        return 0.0, 0.0
    if big <= 0 or p + q > big + 1e-12:
        return None
    alpha = min((p + q) / big, 1.0)
    r = (p - q) / alpha
    if r < abs(a - b) - 1e-12 or r > a + b + 1e-12:
        return None
    if a * b <= 0:
        return alpha, 0.0
    c = (r * r - a * a - b * b) / (2 * a * b)
    return alpha, float(np.arccos(np.clip(c, -1.0, 1.0)))


def _in_triangle(pt, a, b, c, tol=1e-12) -> bool:
    def cross(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

    d1, d2, d3 = cross(a, b, pt), cross(b, c, pt), cross(c, a, pt)
    neg = min(d1, d2, d3) < -tol
    pos = max(d1, d2, d3) > tol
    return not (neg and pos)


def classify_triangle(la, lb, lam) -> str | None:
    """First triangle among OCD, OAB, OBC containing (la, lb), with la >= lb."""
    v = region_vertices(lam)
    tri = {"OCD": (v.O, v.C, v.D), "OAB": (v.O, v.A, v.B), "OBC": (v.O, v.B, v.C)}
    for name in FAMILIES:
        if _in_triangle((la, lb), *tri[name]):
            return name
    return None


def _project(la, lb, lam):
    """Clip a point of the la >= lb half onto the region (used only for tiny violations)."""
    l1, l2, l3, l4 = lam
    m = min(l1 - l3, l2 - l4)
    big = l1 + l2 - l3 - l4
    p, q = 1.0 - la - lb, la - lb
    q = min(max(q, 0.0), m)
    p = min(max(p, q), l1 - l4)
    p = min(p, big - q)
    return p, q


def witness_two_qubit(q: TwoQubitQuery, tol: Tolerances = DEFAULT_TOL):
    """Two-qubit state with spectrum ``q.spectrum`` and marginal lowest
    eigenvalues ``(q.la, q.lb)``; returns ``(DensityMatrix, WitnessParams)``."""
    slack = tol.with_overrides(maj=max(tol.maj, tol.boundary))
    bad = two_qubit_violations(q, slack)
    if bad:
        raise MembershipError(f"({q.la}, {q.lb}) violates: {bad[0][1]}")
    lam = _spec4(q.spectrum)
    swapped = q.la < q.lb
    la, lb = (q.lb, q.la) if swapped else (q.la, q.lb)
    p, qq = _project(la, lb, lam)
    first = classify_triangle(0.5 * (1 - p + qq), 0.5 * (1 - p - qq), lam) or FAMILIES[0]
    order = [first] + [f for f in FAMILIES if f != first]
    case_swap = bool(lam[0] - lam[2] < lam[1] - lam[3])
    for family in order:
        params = _invert(family, lam, p, qq)
        if params is None:
            continue
        alpha, second = params
        rho = family_state(family, lam, alpha, second)
        if swapped:
            rho = SWAP @ rho @ SWAP
        wp = WitnessParams(family, float(alpha), float(second), swapped, case_swap)
        out = DensityMatrix(rho, (2, 2))
        res = witness_residuals(out, q)
        if max(res.values()) > tol.eig:
            raise ConstructionError(
                f"family {family} with alpha={alpha:.6g}, second={second:.6g} misses the target: {res}"
            )
        return out, wp
    raise ConstructionError(f"no family covers (p, q) = ({p:.6g}, {qq:.6g}) for spectrum {lam.tolist()}")


def marginal_lows(rho: DensityMatrix) -> tuple:
    """Lowest eigenvalues of both single-qubit marginals of a two-qubit state."""
    a = partial_trace(rho, [0])
    b = partial_trace(rho, [1])
    return spectrum(a).values[-1], spectrum(b).values[-1]


def witness_residuals(rho: DensityMatrix, q: TwoQubitQuery) -> dict:
    w, _ = eig_hermitian(rho.matrix)
    la, lb = marginal_lows(rho)
    return {
        "spectrum": float(np.max(np.abs(w - q.spectrum.array()))),
        "lambda_A": abs(la - q.la),
        "lambda_B": abs(lb - q.lb),
    }


# --- pure states on C^2 x C^2 x C^4 -----------------------------------------

def _local_lows(rho_a, rho_b, rho_c):
    for name, r, d in (("rho_A", rho_a, 2), ("rho_B", rho_b, 2), ("rho_C", rho_c, 4)):
        if r.matrix.shape != (d, d):
            raise DimensionError(f"{name} must be {d}x{d}, got {r.matrix.shape}")
    return spectrum(rho_a).values[-1], spectrum(rho_b).values[-1], spectrum(rho_c)


def pure_224_query(rho_a, rho_b, rho_c) -> TwoQubitQuery:
    la, lb, lc = _local_lows(rho_a, rho_b, rho_c)
    return TwoQubitQuery(la, lb, lc)


def check_pure_224(rho_a, rho_b, rho_c, tol: Tolerances = DEFAULT_TOL) -> bool:
    return check_two_qubit(pure_224_query(rho_a, rho_b, rho_c), tol)


def witness_pure_224(rho_a, rho_b, rho_c, tol: Tolerances = DEFAULT_TOL) -> PureState:
    """Pure state on C^2 x C^2 x C^4 with the three given marginals."""
    q = pure_224_query(rho_a, rho_b, rho_c)
    rho, _ = witness_two_qubit(q, tol)
    # rotate the witness marginals onto the requested local bases
    for k, target in ((0, rho_a), (1, rho_b)):
        _, v = standard_form(target)
        _, w = standard_form(partial_trace(rho, [k]))
        x = v.conj().T @ w
        full = np.kron(x, np.eye(2)) if k == 0 else np.kron(np.eye(2), x)
        rho = DensityMatrix(full @ rho.matrix @ full.conj().T, (2, 2))
    psi = purify(rho)
    # ancilla marginal is diag(spectrum); rotate it onto rho_C's eigenbasis
    _, vc = eig_hermitian(rho_c.matrix)
    psi = apply_local(psi, 2, vc)
    err = max(
        np.max(np.abs(partial_trace(psi.density(), [i]).matrix - r.matrix))
        for i, r in enumerate((rho_a, rho_b, rho_c))
    )
    if err > 1e-7:
        raise ConstructionError(f"pure 2x2x4 witness misses a marginal by {err:.3g}")
    return psi
