"""Mixtures of a fixed-spectrum orbit and their local marginals.

A pair (rho_A, rho_B) is a marginal of some state in the convex hull of
the states with spectrum ``lam`` iff there is a joint distribution whose
row sums are eig(rho_A), whose column sums are eig(rho_B) and which is
majorized by ``lam``.  Feasibility of that table is a linear program.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ContractViolation, DimensionError
from .linalg import DensityMatrix, Spectrum, eig_hermitian, spectrum
from .numerics.simplex import lp_feasible
from .spectra import majorizes
from .tolerances import DEFAULT_TOL, Tolerances

# above this many cells the top-k constraints use auxiliary variables
SUBSET_LIMIT = 8


@dataclass(frozen=True)
class JointDistribution:
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise DimensionError("a joint distribution is a nonempty 2-d table")
        if np.any(t < -DEFAULT_TOL.psd):
            raise ContractViolation("joint distribution has negative entries")
        if abs(t.sum() - 1.0) > DEFAULT_TOL.tr:
            raise ContractViolation(f"joint distribution sums to {t.sum():.12g}")
        t = np.clip(t, 0.0, None)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def row_sums(self):
        return self.table.sum(axis=1)

    def col_sums(self):
        return self.table.sum(axis=0)


@dataclass(frozen=True)
class ConvQuery:
    spec_a: Spectrum
    spec_b: Spectrum
    lam: Spectrum

    def __post_init__(self):
        for name in ("spec_a", "spec_b", "lam"):
            v = getattr(self, name)
            if not isinstance(v, Spectrum):
                object.__setattr__(self, name, Spectrum.of(v))
        da, db = len(self.spec_a), len(self.spec_b)
        if len(self.lam) > da * db:
            raise DimensionError(
                f"spectrum of length {len(self.lam)} does not fit a {da}x{db} table"
            )


def _marginal_rows(da, db):
    n = da * db
    rows = np.zeros((da + db, n))
    for i in range(da):
        rows[i, i * db:(i + 1) * db] = 1.0
    for j in range(db):
        rows[da + j, j::db] = 1.0
    return rows


def _subset_constraints(n, lam):
    """Every size-k subset of the cells carries at most the top-k mass of lam."""
    top = np.cumsum(lam)
    rows, rhs = [], []
    for k in range(1, n):
        for s in combinations(range(n), k):
            r = np.zeros(n)
            r[list(s)] = 1.0
            rows.append(r)
            rhs.append(top[k - 1])
    return np.array(rows), np.array(rhs)


def _topk_aux_system(n, lam, a_eq, b_eq):
    """Top-k sums via ``k t_k + sum_i u_ki <= c_k``, ``u_ki >= x_i - t_k``, ``u >= 0``.

    ``t_k`` is free and written as ``t+ - t-``.  Variables are laid out as
    [x (n), then per k: t+, t-, u_1..u_n].
    """
    top = np.cumsum(lam)
    ks = list(range(1, n))
    block = 2 + n
    total = n + block * len(ks)
    ub_rows, ub_rhs = [], []
    for idx, k in enumerate(ks):
        off = n + idx * block
        r = np.zeros(total)
        r[off], r[off + 1] = k, -k
        r[off + 2:off + 2 + n] = 1.0
        ub_rows.append(r)
        ub_rhs.append(top[k - 1])
        for i in range(n):
            r = np.zeros(total)
            r[i] = 1.0
            r[off], r[off + 1] = -1.0, 1.0
            r[off + 2 + i] = -1.0
            ub_rows.append(r)
            ub_rhs.append(0.0)
    eq = np.hstack([a_eq, np.zeros((a_eq.shape[0], total - n))])
    return eq, b_eq, np.array(ub_rows), np.array(ub_rhs), total


def conv_membership(q: ConvQuery, tol: Tolerances = DEFAULT_TOL, encoding: str = "auto"):
    """A table with the requested marginals majorized by ``lam``, or None.

    ``encoding`` picks the top-k constraint form: ``"subsets"`` enumerates
    every cell subset, ``"aux"`` uses auxiliary variables, ``"auto"``
    switches on table size.
    """
    pa, pb = q.spec_a.array(), q.spec_b.array()
    da, db = pa.size, pb.size
    n = da * db
    lam = np.pad(q.lam.array(), (0, n - len(q.lam)))
    a_eq = _marginal_rows(da, db)
    b_eq = np.concatenate([pa, pb])
    if encoding == "auto":
        encoding = "subsets" if n <= SUBSET_LIMIT else "aux"
    if encoding == "subsets":
        a_ub, b_ub = _subset_constraints(n, lam)
        x = lp_feasible(A_eq=a_eq, b_eq=b_eq, A_ub=a_ub if len(a_ub) else None,
                        b_ub=b_ub if len(b_ub) else None, n=n, tol=tol.tr)
    elif encoding == "aux":
        eq, beq, a_ub, b_ub, total = _topk_aux_system(n, lam, a_eq, b_eq)
        x = lp_feasible(A_eq=eq, b_eq=beq, A_ub=a_ub if len(a_ub) else None,
                        b_ub=b_ub if len(b_ub) else None, n=total, tol=tol.tr)
        x = None if x is None else x[:n]
    else:
        raise ContractViolation(f"unknown encoding {encoding!r}")
    if x is None:
        return None
    x = np.clip(x, 0.0, None)
    p = JointDistribution(x.reshape(da, db) / x.sum())
    if not certify(p, q, tol):
        raise ContractViolation("LP returned a table that fails its own certificate")
    return p


def certify(p: JointDistribution, q: ConvQuery, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Re-check marginals and majorization of a candidate table."""
    ok_rows = np.allclose(p.row_sums(), q.spec_a.array(), atol=1e-8)
    ok_cols = np.allclose(p.col_sums(), q.spec_b.array(), atol=1e-8)
    slack = tol.with_overrides(maj=max(tol.maj, 1e-9))
    return bool(ok_rows and ok_cols and majorizes(p.table.ravel(), q.lam.array(), slack))


def _eigenbasis(rho: DensityMatrix):
    w, v = eig_hermitian(rho.matrix)
    return w, v


def separable_witness(rho_a: DensityMatrix, rho_b: DensityMatrix, p: JointDistribution) -> DensityMatrix:
    """``sum_ij p_ij |i_A><i_A| x |j_B><j_B|`` in the decreasing eigenbases of the locals."""
    wa, va = _eigenbasis(rho_a)
    wb, vb = _eigenbasis(rho_b)
    t = p.table
    if t.shape != (wa.size, wb.size):
        raise DimensionError(f"table shape {t.shape} does not match locals ({wa.size}, {wb.size})")
    if not (np.allclose(t.sum(axis=1), wa, atol=1e-8) and np.allclose(t.sum(axis=0), wb, atol=1e-8)):
        raise ContractViolation("table marginals differ from the local spectra")
    u = np.kron(va, vb)
    rho = (u * t.ravel()[None, :]) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), (wa.size, wb.size))


def diag_distribution(rho: DensityMatrix, basis_a, basis_b, tol: Tolerances = DEFAULT_TOL) -> JointDistribution:
    """``p_ij = <i_A j_B| rho |i_A j_B>``; bases are given as matrices of column vectors."""
    ba = np.asarray(basis_a, dtype=complex)
    bb = np.asarray(basis_b, dtype=complex)
    for name, b in (("basis_a", ba), ("basis_b", bb)):
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DimensionError(f"{name} must be a square matrix")
        if np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0]))) > tol.orth:
            raise ContractViolation(f"{name} is not orthonormal")
    if rho.dim != ba.shape[0] * bb.shape[0]:
        raise DimensionError("bases do not match the state dimension")
    u = np.kron(ba, bb)
    d = np.einsum("ki,kl,li->i", u.conj(), rho.matrix, u).real
    return JointDistribution(np.clip(d, 0.0, None).reshape(ba.shape[0], bb.shape[0]) / d.sum())


def tripartite_necessary(rho_a: DensityMatrix, rho_b: DensityMatrix, rho_c: DensityMatrix,
                         tol: Tolerances = DEFAULT_TOL) -> tuple:
    """Pairwise conditions for a tripartite pure state: each pair of marginals
    must lie in the hull for the spectrum of the third."""
    sa, sb, sc = spectrum(rho_a), spectrum(rho_b), spectrum(rho_c)

    def fits(x, y, z):
        n = len(x) * len(y)
        vals = z.array()
        if vals.size > n:
            # zero-padding may only drop trailing zeros
            if np.any(vals[n:] > tol.psd):
                raise DimensionError("third spectrum has more support than the pair can hold")
            vals = vals[:n]
            vals = vals / vals.sum()
        return conv_membership(ConvQuery(x, y, Spectrum.of(vals)), tol) is not None

    return fits(sa, sb, sc), fits(sb, sc, sa), fits(sc, sa, sb)
