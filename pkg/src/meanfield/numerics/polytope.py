"""Brute-force vertex enumeration for small polytopes ``{x : A x <= b}``.

Every choice of ``n`` constraints is made active and the resulting square
system solved; nonsingular solutions that satisfy all constraints are the
vertices.  Cost grows like ``C(m, n)``, fine for a few hundred thousand
subsets.
"""
from __future__ import annotations

from itertools import combinations, islice

import numpy as np


def enumerate_vertices(a, b, tol: float = 1e-9, chunk: int = 50_000) -> np.ndarray:
    """Distinct vertices of ``{x : a @ x <= b}`` as rows, sorted lexicographically."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    found = {}
    subsets = combinations(range(m), n)
    while True:
        idx = np.array(list(islice(subsets, chunk)), dtype=int)
        if idx.size == 0:
            break
        mats = a[idx]
        rhs = b[idx]
        ok = np.abs(np.linalg.det(mats)) > 1e-12
        if not ok.any():
            continue
        x = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
        feas = np.all(x @ a.T <= b + tol, axis=1)
        for v in x[feas]:
            key = tuple(np.round(v / tol).astype(np.int64))
            found.setdefault(key, v)
    out = np.array(sorted(found.values(), key=tuple)) if found else np.zeros((0, n))
    return out
