import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from meanfield.errors import ContractViolation
from meanfield.linalg import spectrum
from meanfield.numerics import (
    OrbitProblem,
    SeededStream,
    check_point,
    f_functional,
    lp_feasible,
    orbit_optimize,
    random_fixed_spectrum,
    random_haar_pure,
)
from meanfield.numerics.orbit import SWAP
from meanfield.numerics.polytope import enumerate_vertices
from meanfield.two_qubit import min_trace_fixed_spectrum, sup_F_bound


def test_stream_determinism():
    a = random_haar_pure((2, 3), SeededStream(5)).amplitudes
    b = random_haar_pure((2, 3), SeededStream(5)).amplitudes
    c = random_haar_pure((2, 3), SeededStream(6)).amplitudes
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    s = SeededStream(5)
    assert not np.array_equal(s.spawn(0).generator.random(4), s.spawn(1).generator.random(4))
    assert np.array_equal(s.spawn(3).generator.random(4), SeededStream(5).spawn(3).generator.random(4))


def test_haar_first_amplitude_statistic():
    gen = SeededStream(99).generator
    z = gen.standard_normal((100_000, 4)) + 1j * gen.standard_normal((100_000, 4))
    z /= np.linalg.norm(z, axis=1)[:, None]
    x = np.abs(z[:, 0]) ** 2
    # |<e1|psi>|^2 is Beta(1, 3): mean 1/4, variance 3/80
    sigma = np.sqrt(3 / 80 / x.size)
    assert abs(x.mean() - 0.25) <= 3 * sigma


def test_haar_invariance_of_overlap():
    base = SeededStream(4)
    u = np.linalg.qr(np.random.default_rng(0).normal(size=(4, 4)) + 1j * np.random.default_rng(1).normal(size=(4, 4)))[0]
    a, b = [], []
    for k in range(20_000):
        psi = random_haar_pure((4,), base.spawn(k)).amplitudes
        a.append(abs(psi[0]) ** 2)
        b.append(abs((u @ psi)[0]) ** 2)
    sigma = np.sqrt(3 / 80 / len(a))
    assert abs(np.mean(a) - np.mean(b)) <= 5 * sigma


def test_fixed_spectrum_examples():
    rho = random_fixed_spectrum([1, 0, 0, 0], SeededStream(1))
    assert np.allclose(rho.matrix @ rho.matrix, rho.matrix, atol=1e-12)
    rho = random_fixed_spectrum([0.25] * 4, SeededStream(2))
    assert np.allclose(rho.matrix, np.eye(4) / 4, atol=1e-14)
    base = SeededStream(3)
    for k in range(1000):
        s = base.spawn(k)
        lam = np.sort(s.generator.dirichlet(np.ones(4)))[::-1]
        assert np.max(np.abs(spectrum(random_fixed_spectrum(lam, s)).array() - lam)) <= 1e-10


def test_lp_examples():
    x = lp_feasible(A_eq=[[1, 1]], b_eq=[1])
    assert x is not None and abs(x.sum() - 1) <= 1e-12 and np.all(x >= 0)
    assert lp_feasible(A_eq=[[1, 1]], b_eq=[1], A_ub=[[-1, 0]], b_ub=[-2]) is None
    assert lp_feasible(A_ub=[[1, 1]], b_ub=[-1]) is None


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32), m_eq=st.integers(0, 4), m_ub=st.integers(0, 6), n=st.integers(1, 7))
def test_lp_agrees_with_scipy(seed, m_eq, m_ub, n):
    rng = np.random.default_rng(seed)
    a_eq = rng.integers(-3, 4, size=(m_eq, n)).astype(float)
    a_ub = rng.integers(-3, 4, size=(m_ub, n)).astype(float)
    x0 = rng.random(n) * (rng.random(n) < 0.7)
    b_eq = a_eq @ x0 + (rng.random(m_eq) < 0.3) * rng.normal(size=m_eq)
    b_ub = a_ub @ x0 + rng.normal(size=m_ub)
    kw = dict(A_eq=a_eq if m_eq else None, b_eq=b_eq if m_eq else None,
              A_ub=a_ub if m_ub else None, b_ub=b_ub if m_ub else None)
    x = lp_feasible(n=n, **kw)
    ref = linprog(np.zeros(n), bounds=[(0, None)] * n, method="highs", **kw)
    assert (x is not None) == (ref.status == 0)
    if x is not None:
        assert check_point(x, tol=1e-9, **kw)


def test_lp_transportation_against_grid():
    rng = np.random.default_rng(8)
    for _ in range(30):
        r = np.round(rng.dirichlet(np.ones(2)), 2)
        r[1] = 1 - r[0]
        c = np.round(rng.dirichlet(np.ones(2)), 2)
        c[1] = 1 - c[0]
        cap = np.round(rng.uniform(0, 1), 2)
        # 2x2 table with given margins, first cell at most cap
        a_eq = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0]]
        x = lp_feasible(A_eq=a_eq, b_eq=[r[0], r[1], c[0]], A_ub=[[1, 0, 0, 0]], b_ub=[cap])
        grid = np.arange(0, 1.0005, 0.001)
        t = grid[(grid <= min(r[0], c[0]) + 1e-12) & (grid >= r[0] + c[0] - 1 - 1e-12) & (grid <= cap + 1e-12)]
        assert (x is not None) == (t.size > 0)


def test_vertices_of_square():
    v = enumerate_vertices([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 0, 1, 0])
    assert sorted(map(tuple, np.round(v, 12))) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_orbit_problem_validation():
    with pytest.raises(ContractViolation):
        OrbitProblem((0.5, 0.5), None, "trace")
    with pytest.raises(ContractViolation):
        OrbitProblem((0.5, 0.3, 0.2), None, "F")
    with pytest.raises(ContractViolation):
        OrbitProblem((0.5, 0.5), np.eye(2), "trace", "sideways")


def test_orbit_trace_minimum_small():
    s = SeededStream(21)
    for k in range(5):
        c = s.spawn(k)
        lam = np.sort(c.generator.dirichlet(np.ones(4)))[::-1]
        o = np.sort(c.generator.normal(size=4))[::-1]
        u = np.linalg.qr(c.generator.normal(size=(4, 4)))[0]
        res = orbit_optimize(OrbitProblem(lam, u @ np.diag(o) @ u.T), 10, c)
        cf = min_trace_fixed_spectrum(o, lam)
        assert res.value >= cf - 1e-6
        assert res.value - cf <= 1e-4
        assert np.max(np.abs(spectrum(res.state).array() - lam)) <= 1e-9


def test_orbit_uniform_F_is_zero():
    res = orbit_optimize(OrbitProblem([0.25] * 4, None, "F", "maximize"), 3, SeededStream(0))
    assert abs(res.value) <= 1e-12


def test_orbit_F_example():
    lam = [0.5, 0.25, 0.25, 0.0]
    assert sup_F_bound(lam) == pytest.approx(0.5)
    res = orbit_optimize(OrbitProblem(lam, None, "F", "maximize"), 20, SeededStream(5))
    assert res.value <= 0.5 + 1e-6
    assert res.value >= 0.5 - 1e-3


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_F_swap_antisymmetry(seed):
    s = SeededStream(seed)
    lam = np.sort(s.generator.dirichlet(np.ones(4)))[::-1]
    eta = random_fixed_spectrum(lam, s, dims=(2, 2)).matrix
    assert abs(f_functional(SWAP @ eta @ SWAP) + f_functional(eta)) <= 1e-12
