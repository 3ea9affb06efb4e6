"""Dense complex linear algebra for small multipartite systems.

Everything here works on plain ``numpy`` arrays.  Density matrices and pure
states carry the list of tensor-factor dimensions alongside the data so that
partial traces know how to reshape.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import (
    ContractViolation,
    DensityViolation,
    DimensionCapError,
    DimensionError,
    FactorIndexError,
)
from .tolerances import DEFAULT_TOL, Tolerances

DIM_CAP = 256


def _frozen(a):
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a complex square matrix, rejecting non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractViolation("matrix has non-finite entries")
    return a


def _check_dims(dims, total):
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"factor dimensions must be positive, got {dims}")
    if prod(dims) != total:
        raise DimensionError(f"factor dimensions {dims} do not multiply to {total}")
    return dims


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue string in nonincreasing order."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def of(cls, values, tol: Tolerances = DEFAULT_TOL) -> "Spectrum":
        """Validate and sort ``values`` into a spectrum."""
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise ContractViolation("empty spectrum")
        if np.any(v < -tol.psd):
            raise ContractViolation(f"negative eigenvalue {v.min():.3g}")
        if abs(v.sum() - 1.0) > tol.tr:
            raise ContractViolation(f"spectrum sums to {v.sum():.12g}, not 1")
        return cls(tuple(np.sort(np.clip(v, 0.0, None))[::-1]))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def array(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix together with its tensor-factor dimensions.

    Construction only normalizes shapes.  Use :func:`validate_density` for
    untrusted data; the library's own constructors produce valid states.
    """

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", _check_dims(self.dims, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> Spectrum:
        return spectrum(self)

    def allclose(self, other, atol=1e-8) -> bool:
        other = other.matrix if isinstance(other, DensityMatrix) else other
        return np.allclose(self.matrix, other, atol=atol, rtol=0)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(a)):
            raise ContractViolation("amplitudes have non-finite entries")
        object.__setattr__(self, "amplitudes", _frozen(a))
        object.__setattr__(self, "dims", _check_dims(self.dims, a.size))
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > DEFAULT_TOL.tr:
            raise ContractViolation(f"state has squared norm {norm2:.12g}")

    def density(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.dims)


def kron(a, b, cap: int = DIM_CAP) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    dim = a.shape[0] * b.shape[0]
    if dim > cap:
        raise DimensionCapError(f"tensor product dimension {dim} exceeds cap {cap}")
    return np.kron(a, b)


def _keep_indices(keep, n):
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise FactorIndexError("must keep at least one factor")
    bad = [k for k in keep if not 0 <= k < n]
    if bad:
        raise FactorIndexError(f"factor indices {bad} out of range for {n} factors")
    return keep


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every factor not listed in ``keep`` (0-based indices).

    The kept factors stay in their original order.
    """
    n = len(rho.dims)
    keep = _keep_indices(keep, n)
    t = rho.matrix.reshape(rho.dims + rho.dims)
    traced = [k for k in range(n) if k not in keep]
    # einsum labels: row index i_k, column index j_k; traced factors share a label
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = list(letters[:n])
    cols = [rows[k] if k in traced else letters[n + k] for k in range(n)]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    red = np.einsum(f"{''.join(rows)}{''.join(cols)}->{''.join(out)}", t)
    d = prod(rho.dims[k] for k in keep)
    return DensityMatrix(red.reshape(d, d), tuple(rho.dims[k] for k in keep))


def reduced_state(psi: PureState, keep) -> DensityMatrix:
    """Marginal of a pure state on the factors in ``keep`` without forming |psi><psi|."""
    n = len(psi.dims)
    keep = _keep_indices(keep, n)
    traced = [k for k in range(n) if k not in keep]
    t = psi.amplitudes.reshape(psi.dims).transpose(keep + traced)
    d = prod(psi.dims[k] for k in keep)
    m = t.reshape(d, -1)
    return DensityMatrix(m @ m.conj().T, tuple(psi.dims[k] for k in keep))


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _sorted_eig(w, v):
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    # fix each eigenvector's phase so its largest entry is real positive
    piv = np.argmax(np.abs(v) > np.abs(v).max(axis=0) * (1 - 1e-9), axis=0)
    ph = v[piv, np.arange(v.shape[1])]
    v = v * (np.abs(ph) / ph)
    return w, v


def jacobi_eigh(m, tol: float = 1e-13, max_sweeps: int = 100):
    """Cyclic complex Jacobi eigensolver, eigenvalues in ascending order.

    Each rotation first removes the phase of the pivot and then applies the
    classical real Jacobi rotation to the 2x2 block.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                ag = abs(g)
                if ag <= 1e-300:
                    continue
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = g / ag
                # G = diag(1, conj(ph)) @ [[c, s], [-s, c]]
                G = np.array([[c, s], [-s * ph.conjugate(), c * ph.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ G
                a[idx, :] = G.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ G
    else:
        raise ContractViolation("Jacobi iteration did not converge")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian(m, method: str = "lapack", tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with values in nonincreasing order and the
    eigenvectors as columns.  Each eigenvector's phase is fixed so that its
    largest-magnitude entry is real and positive.  ``method`` selects LAPACK
    (``"lapack"``) or the built-in cyclic Jacobi solver (``"jacobi"``).
    """
    a = as_matrix(m)
    err = hermiticity_error(a)
    if err > tol.herm:
        raise ContractViolation(f"matrix is not Hermitian (error {err:.3g})")
    a = 0.5 * (a + a.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(a)
    elif method == "jacobi":
        w, v = jacobi_eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return _sorted_eig(w, v)


def spectrum(rho, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[::-1]
    if w[-1] < -tol.psd:
        raise ContractViolation(f"negative eigenvalue {w[-1]:.3g}")
    return Spectrum(tuple(np.clip(w, 0.0, None)))


def density_violations(m, tol: Tolerances = DEFAULT_TOL):
    """List the density-matrix invariants ``m`` breaks, as ``(name, magnitude)``."""
    a = as_matrix(m)
    out = []
    herm = hermiticity_error(a)
    if herm > tol.herm:
        out.append(("hermiticity", herm))
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    if w[0] < -tol.psd:
        out.append(("positivity", float(-w[0])))
    tr_err = abs(np.trace(a).real - 1.0)
    if tr_err > tol.tr:
        out.append(("trace", float(tr_err)))
    return out


def validate_density(m, dims=None, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Check the three density-matrix invariants and wrap ``m``.

    Raises :class:`DensityViolation` listing every broken invariant.
    """
    a = as_matrix(m)
    bad = density_violations(a, tol)
    if bad:
        raise DensityViolation(bad)
    return DensityMatrix(0.5 * (a + a.conj().T), dims if dims is not None else (a.shape[0],))


def purify(rho: DensityMatrix) -> PureState:
    """Purification sum_k sqrt(lam_k) |v_k> (x) |k> on dims(rho) + [dim]."""
    w, v = eig_hermitian(rho.matrix)
    w = np.clip(w, 0.0, None)
    d = rho.dim
    psi = (v * np.sqrt(w)[None, :]).reshape(d * d)
    psi = psi / np.linalg.norm(psi)
    return PureState(psi, tuple(rho.dims) + (d,))


def apply_local(psi: PureState, factor: int, unitary) -> PureState:
    """Apply ``unitary`` to tensor factor ``factor`` of ``psi``."""
    n = len(psi.dims)
    if not 0 <= factor < n:
        raise FactorIndexError(f"factor {factor} out of range for {n} factors")
    u = as_matrix(unitary)
    if u.shape[0] != psi.dims[factor]:
        raise DimensionError("unitary does not match the factor dimension")
    t = psi.amplitudes.reshape(psi.dims)
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [factor])), 0, factor)
    return PureState(t.reshape(-1), psi.dims)


def conjugate(rho: DensityMatrix, unitary) -> DensityMatrix:
    u = as_matrix(unitary)
    return DensityMatrix(u @ rho.matrix @ u.conj().T, rho.dims)
