"""Hill climbing on the unitary orbit of a fixed spectrum.

Points are ``eta = U diag(lam) U^dagger``; a move replaces ``U`` by
``exp(i eps h) U`` for a Hermitian direction ``h``.  Every restart runs as one
slice of a batched array so the restarts advance together.

Proposals are random: ``h`` is a unit Gaussian Hermitian matrix mixed with
the local steepest direction ``-/+ i[eta, X]``, where ``X`` is the operator
whose trace against the perturbation gives the first-order change of the
objective (``X = O`` for ``tr(O eta)``).  A move is kept only if it improves
the objective.  The step grows on success and halves on failure; a restart
stops once the step drops below ``eps_min`` or the first-order term vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import ContractViolation
from ..linalg import DensityMatrix, Spectrum, as_matrix
from .rng import as_stream, complex_gaussian, haar_unitaries

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)
_I2 = np.eye(2)
SIGMA_A = np.array([np.kron(p, _I2) for p in PAULI])
SIGMA_B = np.array([np.kron(_I2, p) for p in PAULI])
SWAP = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class OrbitProblem:
    """Objective over D(H, lam).

    ``objective`` is ``"trace"`` for ``tr(operator @ eta)`` or ``"F"`` for the
    two-qubit polarization difference ``|b| - |a|``.
    """

    spectrum: tuple
    operator: np.ndarray | None = None
    objective: str = "trace"
    direction: str = "minimize"
    dims: tuple | None = None

    def __post_init__(self):
        lam = self.spectrum.array() if isinstance(self.spectrum, Spectrum) else self.spectrum
        lam = Spectrum.of(lam)
        object.__setattr__(self, "spectrum", lam)
        if self.direction not in ("minimize", "maximize"):
            raise ContractViolation(f"unknown direction {self.direction!r}")
        if self.objective == "trace":
            if self.operator is None:
                raise ContractViolation("trace objective needs an operator")
            op = as_matrix(self.operator)
            if op.shape[0] != len(lam):
                raise ContractViolation("operator and spectrum sizes differ")
            object.__setattr__(self, "operator", 0.5 * (op + op.conj().T))
        elif self.objective == "F":
            if len(lam) != 4:
                raise ContractViolation("F is defined on two qubits only")
            if self.dims is None:
                object.__setattr__(self, "dims", (2, 2))
        else:
            raise ContractViolation(f"unknown objective {self.objective!r}")
        if self.dims is None:
            object.__setattr__(self, "dims", (len(lam),))

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "minimize" else -1.0


class OrbitResult(NamedTuple):
    value: float
    state: DensityMatrix


def polarizations(eta):
    """Bloch vectors (a, b) of both qubit marginals of a batch of 4x4 states."""
    a = np.einsum("kij,bji->bk", SIGMA_A, eta).real
    b = np.einsum("kij,bji->bk", SIGMA_B, eta).real
    return a, b


def f_functional(eta) -> np.ndarray:
    """F = |b| - |a| for a single 4x4 matrix or a batch of them."""
    eta = np.asarray(eta, dtype=complex)
    single = eta.ndim == 2
    a, b = polarizations(eta[None] if single else eta)
    out = np.linalg.norm(b, axis=1) - np.linalg.norm(a, axis=1)
    return out[0] if single else out


def _value_and_operator(problem, eta):
    """Objective values and first-order operators X for a batch of states."""
    if problem.objective == "trace":
        op = problem.operator
        return np.einsum("ij,bji->b", op, eta).real, np.broadcast_to(op, eta.shape)
    a, b = polarizations(eta)
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    ah = np.where(na[:, None] > 1e-12, a / np.maximum(na, 1e-300)[:, None], 0.0)
    bh = np.where(nb[:, None] > 1e-12, b / np.maximum(nb, 1e-300)[:, None], 0.0)
    x = np.einsum("bk,kij->bij", bh, SIGMA_B) - np.einsum("bk,kij->bij", ah, SIGMA_A)
    return nb - na, x


def _dagger(m):
    return m.conj().transpose(0, 2, 1)


def orbit_optimize(
    problem: OrbitProblem,
    restarts: int = 50,
    stream=None,
    *,
    eps0: float = 0.1,
    eps_min: float = 1e-7,
    grow: float = 1.3,
    noise: float = 0.3,
    grad_tol: float = 1e-10,
    max_steps: int = 20_000,
    reorthonormalize_every: int = 100,
    start=None,
) -> OrbitResult:
    """Best value of the objective found over ``restarts`` independent climbs.

    Restarts begin at Haar-random points of the orbit; ``start`` (a matrix
    with the right spectrum) replaces the first restart's starting point.
    Optimality is not guaranteed; callers bracket results against known bounds.
    """
    gen = as_stream(stream).generator
    lam = problem.spectrum.array()
    d = lam.size
    u = haar_unitaries(gen, d, restarts)
    if start is not None:
        m = as_matrix(start.matrix if isinstance(start, DensityMatrix) else start)
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        u[0] = v[:, ::-1]
    sign = problem.sign

    def states(us):
        return (us * lam[None, None, :]) @ _dagger(us)

    eta = states(u)
    f, x = _value_and_operator(problem, eta)
    f = sign * f
    eps = np.full(restarts, float(eps0))
    active = np.arange(restarts)
    for step in range(1, max_steps + 1):
        if active.size == 0:
            break
        e = eta[active]
        g = 1j * (e @ x[active] - x[active] @ e)
        gn = np.linalg.norm(g, axis=(1, 2))
        r = complex_gaussian(gen, (active.size, d, d))
        r = r + _dagger(r)
        r /= np.linalg.norm(r, axis=(1, 2))[:, None, None]
        descent = np.where(gn[:, None, None] > grad_tol, -sign * g / np.maximum(gn, 1e-300)[:, None, None], 0.0)
        h = descent + noise * r
        h /= np.linalg.norm(h, axis=(1, 2))[:, None, None]
        w, v = np.linalg.eigh(h)
        ex = (v * np.exp(1j * eps[active, None] * w)[:, None, :]) @ _dagger(v)
        u_new = ex @ u[active]
        eta_new = states(u_new)
        f_new, x_new = _value_and_operator(problem, eta_new)
        f_new = sign * f_new
        ok = f_new < f[active]
        acc, rej = active[ok], active[~ok]
        u[acc], eta[acc], f[acc] = u_new[ok], eta_new[ok], f_new[ok]
        if problem.objective == "F":
            x[acc] = x_new[ok]
        eps[acc] = np.minimum(eps[acc] * grow, 1.0)
        eps[rej] *= 0.5
        if step % reorthonormalize_every == 0:
            q, rr = np.linalg.qr(u)
            ph = np.diagonal(rr, axis1=1, axis2=2)
            u = q * (ph / np.abs(ph))[:, None, :]
            eta = states(u)
            f, x = _value_and_operator(problem, eta)
            f = sign * f
        keep = (eps[active] >= eps_min) & (gn > grad_tol)
        active = active[keep]
    best = int(np.argmin(f))
    m = eta[best]
    return OrbitResult(float(sign * f[best]), DensityMatrix(0.5 * (m + m.conj().T), problem.dims))
