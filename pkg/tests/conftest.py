import numpy as np
import pytest

from meanfield.linalg import DensityMatrix
from meanfield.numerics import SeededStream

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def stream():
    return SeededStream(2024)


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def diag_state(values):
    v = np.asarray(values, dtype=float)
    return DensityMatrix(np.diag(v).astype(complex), (v.size,))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail, secs in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {num:2d}. {title}: {detail} ({secs:.2f} s)")
