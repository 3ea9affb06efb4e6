"""Mean field states, single-qubit standard forms and majorization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DimensionError
from .linalg import DensityMatrix, Spectrum, eig_hermitian, spectrum, validate_density
from .numerics.rng import as_stream, haar_unitaries
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class MeanFieldState:
    """Ordered tuple of single-party density matrices (rho_1, ..., rho_n)."""

    locals: tuple

    def __post_init__(self):
        locs = tuple(self.locals)
        if not locs:
            raise ContractViolation("a mean field state needs at least one local state")
        fixed = []
        for rho in locs:
            if not isinstance(rho, DensityMatrix):
                rho = validate_density(rho)
            if len(rho.dims) != 1:
                raise DimensionError("local states must have a single tensor factor")
            fixed.append(rho)
        object.__setattr__(self, "locals", tuple(fixed))

    def __len__(self):
        return len(self.locals)

    def __iter__(self):
        return iter(self.locals)

    def __getitem__(self, i):
        return self.locals[i]


@dataclass(frozen=True)
class QubitMarginVector:
    """Lowest local eigenvalues (lambda_1, ..., lambda_n), each in [0, 1/2]."""

    values: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in np.asarray(self.values, dtype=float).ravel())
        bad = [x for x in v if not (-DEFAULT_TOL.boundary <= x <= 0.5 + DEFAULT_TOL.boundary)]
        if bad:
            raise ContractViolation(f"margin entries {bad} outside [0, 1/2]")
        object.__setattr__(self, "values", tuple(min(max(x, 0.0), 0.5) for x in v))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def array(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True)
class PermutationCombination:
    """Convex combination of permutations: ``p = sum_k w_k * q[perm_k]``."""

    terms: tuple  # of (weight, tuple perm)

    def __post_init__(self):
        terms = tuple((float(w), tuple(int(i) for i in p)) for w, p in self.terms)
        if any(w < 0 for w, _ in terms):
            raise ContractViolation("negative permutation weight")
        total = sum(w for w, _ in terms)
        if abs(total - 1.0) > DEFAULT_TOL.tr:
            raise ContractViolation(f"weights sum to {total:.12g}")
        object.__setattr__(self, "terms", terms)

    def apply(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return sum(w * q[list(p)] for w, p in self.terms)

    def doubly_stochastic(self) -> np.ndarray:
        d = len(self.terms[0][1])
        m = np.zeros((d, d))
        for w, p in self.terms:
            m[np.arange(d), list(p)] += w
        return m


def standard_form(rho: DensityMatrix, tol: Tolerances = DEFAULT_TOL):
    """Lowest eigenvalue ``lam`` and unitary ``U`` with
    ``U rho U^dagger = (1 - lam)|0><0| + lam|1><1|``."""
    if rho.matrix.shape != (2, 2):
        raise DimensionError(f"standard form needs a qubit state, got dim {rho.dim}")
    w, v = eig_hermitian(rho.matrix, tol=tol)
    lam = float(min(max(w[1], 0.0), 0.5))
    return lam, v.conj().T


def margin_vector(m: MeanFieldState) -> QubitMarginVector:
    out = []
    for i, rho in enumerate(m):
        if rho.dim != 2:
            raise DimensionError(f"local state {i} is not a qubit (dim {rho.dim})")
        out.append(spectrum(rho).values[-1])
    return QubitMarginVector(out)


def _prepare(p, q, tol):
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    for name, s in (("p", p), ("q", q)):
        if s.size == 0:
            raise ContractViolation(f"{name} is empty")
        if np.any(s < -tol.psd):
            raise ContractViolation(f"{name} has negative entries")
        if abs(s.sum() - 1.0) > tol.tr:
            raise ContractViolation(f"{name} sums to {s.sum():.12g}, not 1")
    d = max(p.size, q.size)
    p = np.pad(p, (0, d - p.size))
    q = np.pad(q, (0, d - q.size))
    return p, q


def majorizes(p, q, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``p`` is majorized by ``q`` (p < q).

    Shorter strings are zero-padded.  Every top-k partial sum of the sorted
    ``p`` must stay below that of ``q`` up to ``tol.maj``.
    """
    p, q = _prepare(p, q, tol)
    cp = np.cumsum(np.sort(p)[::-1])
    cq = np.cumsum(np.sort(q)[::-1])
    return bool(np.all(cp[:-1] <= cq[:-1] + tol.maj))


def t_transform_chain(p_sorted, q_sorted, tol: float = 1e-13):
    """Hardy-Littlewood-Polya chain from ``q`` down to ``p`` (both decreasing).

    Returns ``[(t, j, k), ...]``: each step replaces ``x`` by
    ``t * x + (1 - t) * x[swap j,k]``.  At most ``d - 1`` steps.
    """
    x = np.array(q_sorted, dtype=float)
    p = np.asarray(p_sorted, dtype=float)
    chain = []
    for _ in range(len(x)):
        diff = x - p
        above = np.flatnonzero(diff > tol)
        if above.size == 0:
            break
        j = above[-1]
        below = np.flatnonzero(diff[j + 1:] < -tol)
        if below.size == 0:
            break
        k = j + 1 + below[0]
        delta = min(x[j] - p[j], p[k] - x[k])
        t = 1.0 - delta / (x[j] - x[k])
        xj, xk = x[j], x[k]
        x[j] = t * xj + (1 - t) * xk
        x[k] = t * xk + (1 - t) * xj
        chain.append((t, int(j), int(k)))
    return chain


def majorization_decompose(p, q, tol: Tolerances = DEFAULT_TOL) -> PermutationCombination:
    """Weights ``t_sigma`` with ``p_i = sum_sigma t_sigma q_sigma(i)``.

    Builds the T-transform chain on the sorted strings, multiplies it out
    into permutations and merges repeated permutations.  At most
    ``2**(d-1)`` terms before merging.
    """
    if not majorizes(p, q, tol):
        raise ContractViolation("p is not majorized by q")
    p, q = _prepare(p, q, tol)
    d = p.size
    op = np.argsort(-p, kind="stable")  # p[op] is decreasing
    oq = np.argsort(-q, kind="stable")
    chain = t_transform_chain(p[op], q[oq])
    # x_sorted = sum w * q_sorted[perm]; compose chain steps right to left
    terms = {tuple(range(d)): 1.0}
    for t, j, k in chain:
        nxt = {}
        for perm, w in terms.items():
            nxt[perm] = nxt.get(perm, 0.0) + w * t
            sw = list(perm)
            sw[j], sw[k] = sw[k], sw[j]
            sw = tuple(sw)
            nxt[sw] = nxt.get(sw, 0.0) + w * (1 - t)
        terms = {s: w for s, w in nxt.items() if w > 0.0}
    # p[op[i]] = sum w q[oq[perm[i]]]  ->  p[m] = sum w q[sigma(m)]
    inv_op = np.empty(d, dtype=int)
    inv_op[op] = np.arange(d)
    out = []
    for perm, w in terms.items():
        sigma = tuple(int(oq[perm[inv_op[m]]]) for m in range(d))
        out.append((w, sigma))
    total = sum(w for w, _ in out)
    return PermutationCombination(tuple((w / total, s) for w, s in out))


def random_mix_with_spectrum(lam, weights, stream=None, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """``sum_a w_a U_a diag(lam) U_a^dagger`` with Haar-random ``U_a``.

    The result's spectrum is checked to be majorized by ``lam``.
    """
    lam = Spectrum.of(lam, tol).array()
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > tol.tr:
        raise ContractViolation("mixing weights must be a probability vector")
    us = haar_unitaries(as_stream(stream).generator, lam.size, w.size)
    rho = np.einsum("a,aij,j,akj->ik", w, us, lam, us.conj())
    out = DensityMatrix(0.5 * (rho + rho.conj().T), (lam.size,))
    if not majorizes(spectrum(out).values, lam, tol):
        raise ContractViolation("mixture spectrum escaped the majorization cone")
    return out
