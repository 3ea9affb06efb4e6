"""Phase-1 simplex for small LP feasibility problems.

Dense tableau, Bland's anti-cycling rule.  Only feasibility is decided: the
phase-1 objective (sum of artificial variables) is driven to zero or proven
positive.
"""
from __future__ import annotations

import numpy as np

from ..errors import LPError

PIVOT_TOL = 1e-11


def _as_rows(a, b, n):
    if a is None:
        return np.zeros((0, n)), np.zeros(0)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if a.shape[0] != b.size:
        raise LPError(f"{a.shape[0]} constraint rows but {b.size} right-hand sides")
    if a.shape[0] and a.shape[1] != n:
        raise LPError(f"expected {n} columns, got {a.shape[1]}")
    return a, b


def lp_feasible(A_eq=None, b_eq=None, A_ub=None, b_ub=None, n=None, tol=1e-9, max_pivots=100_000):
    """Find ``x >= 0`` with ``A_eq x = b_eq`` and ``A_ub x <= b_ub``.

    Returns the point as an array, or ``None`` when phase 1 proves the system
    infeasible.  Returned points are re-checked against the raw constraints
    to within ``tol`` (scaled by the size of the data).
    """
    if n is None:
        for a in (A_eq, A_ub):
            if a is not None and np.size(a):
                n = np.atleast_2d(a).shape[1]
                break
        else:
            raise LPError("cannot infer the number of variables")
    Ae, be = _as_rows(A_eq, b_eq, n)
    Au, bu = _as_rows(A_ub, b_ub, n)
    if not (np.all(np.isfinite(Ae)) and np.all(np.isfinite(Au))
            and np.all(np.isfinite(be)) and np.all(np.isfinite(bu))):
        raise LPError("non-finite coefficients")
    me, mu = Ae.shape[0], Au.shape[0]
    m = me + mu
    if m == 0:
        return np.zeros(n)

    # structural | slacks | artificials; a <= row with b >= 0 starts on its slack
    A = np.zeros((m, n + mu))
    A[:me, :n] = Ae
    A[me:, :n] = Au
    A[me:, n:] = np.eye(mu)
    b = np.concatenate([be, bu])
    neg = b < 0
    A[neg] *= -1
    b = np.abs(b)
    ncols = n + mu
    needs = np.ones(m, dtype=bool)
    needs[me:] = neg[me:]
    art_rows = np.flatnonzero(needs)
    na = art_rows.size
    art = np.zeros((m, na))
    art[art_rows, np.arange(na)] = 1.0
    T = np.hstack([A, art, b[:, None]])
    basis = np.empty(m, dtype=int)
    basis[art_rows] = ncols + np.arange(na)
    slack_rows = np.flatnonzero(~needs)
    basis[slack_rows] = n + slack_rows - me
    cost = np.zeros(ncols + na + 1)
    cost[ncols:ncols + na] = 1.0
    red = cost - T[art_rows].sum(axis=0)  # reduced costs for the starting basis
    red[ncols:ncols + na] = 0.0

    scale = max(1.0, float(np.abs(b).max()))
    for _ in range(max_pivots):
        entering = np.flatnonzero(red[:-1] < -PIVOT_TOL * scale)
        if entering.size == 0:
            break
        j = entering[0]
        col = T[:, j]
        pos = col > PIVOT_TOL
        if not pos.any():
            raise LPError("phase-1 objective unbounded; malformed input")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
        i = ties[np.argmin(basis[ties])]
        T[i] /= T[i, j]
        others = np.arange(m) != i
        T[others] -= np.outer(T[others, j], T[i])
        red -= red[j] * T[i]
        basis[i] = j
    else:
        raise LPError("simplex exceeded the pivot limit")

    if -red[-1] > tol * scale:
        return None

    # recompute the basic solution from the original columns to shed pivot round-off
    full = np.hstack([A, art])
    xb = np.linalg.lstsq(full[:, basis], b, rcond=None)[0]
    x = np.zeros(ncols + na)
    x[basis] = np.clip(xb, 0.0, None)
    sol = x[:n]
    if not _satisfies(sol, Ae, be, Au, bu, tol * scale):
        raise LPError("basic solution failed re-verification")
    return sol


def _satisfies(x, Ae, be, Au, bu, tol):
    if np.any(x < -tol):
        return False
    if Ae.size and np.max(np.abs(Ae @ x - be)) > tol:
        return False
    if Au.size and np.max(Au @ x - bu) > tol:
        return False
    return True


def check_point(x, A_eq=None, b_eq=None, A_ub=None, b_ub=None, tol=1e-9) -> bool:
    """True when ``x`` satisfies the raw constraints within ``tol``."""
    n = np.size(x)
    Ae, be = _as_rows(A_eq, b_eq, n)
    Au, bu = _as_rows(A_ub, b_ub, n)
    return _satisfies(np.asarray(x, dtype=float), Ae, be, Au, bu, tol)
