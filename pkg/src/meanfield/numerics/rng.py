"""Seeded random streams and Haar samplers.

All randomness goes through :class:`SeededStream`, which wraps numpy's
Philox-4x64 counter-based generator.  The 128-bit Philox key is built from
the 64-bit user seed (low word) and a stream id (high word), so spawned
substreams never overlap and the same ``(seed, stream id)`` reproduces the
same numbers bit-for-bit.
"""
from __future__ import annotations

import numpy as np

from ..linalg import DensityMatrix, PureState, Spectrum

_MASK64 = (1 << 64) - 1


class SeededStream:
    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = (self.stream_id << 64) | self.seed
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> "SeededStream":
        """Independent child stream; children of distinct indices never collide."""
        child = (self.stream_id * 0x9E3779B97F4A7C15 + int(index) + 1) & _MASK64
        return SeededStream(self.seed, child)

    def __repr__(self):
        return f"SeededStream(seed={self.seed}, stream_id={self.stream_id})"


def as_stream(stream) -> SeededStream:
    if isinstance(stream, SeededStream):
        return stream
    return SeededStream(0 if stream is None else stream)


def complex_gaussian(gen, shape):
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitaries(gen, d: int, size: int) -> np.ndarray:
    """``size`` Haar-random d x d unitaries, shape (size, d, d).

    QR of a complex Gaussian matrix with the phases of R's diagonal moved
    into Q (without that fix the distribution is not Haar).
    """
    q, r = np.linalg.qr(complex_gaussian(gen, (size, d, d)))
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


def random_unitary(d: int, stream=None) -> np.ndarray:
    return haar_unitaries(as_stream(stream).generator, d, 1)[0]


def random_haar_pure(dims, stream=None) -> PureState:
    dims = tuple(int(d) for d in dims)
    z = complex_gaussian(as_stream(stream).generator, int(np.prod(dims)))
    return PureState(z / np.linalg.norm(z), dims)


def random_fixed_spectrum(lam, stream=None, dims=None) -> DensityMatrix:
    """Haar-random point ``U diag(lam) U^dagger`` of the unitary orbit of ``lam``."""
    lam = lam.array() if isinstance(lam, Spectrum) else np.asarray(lam, dtype=float)
    u = random_unitary(lam.size, stream)
    rho = (u * lam[None, :]) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), dims or (lam.size,))
