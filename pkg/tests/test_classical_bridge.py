import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meanfield.classical_bridge import (
    ConvQuery,
    JointDistribution,
    certify,
    conv_membership,
    diag_distribution,
    separable_witness,
    tripartite_necessary,
)
from meanfield.errors import ContractViolation, DimensionError
from meanfield.linalg import DensityMatrix, partial_trace, spectrum
from meanfield.numerics import SeededStream, random_fixed_spectrum, random_unitary
from meanfield.qubit_array import check_pure_compat_qubits
from meanfield.spectra import majorizes, random_mix_with_spectrum

from conftest import diag_state

COUNTER = ([0.6, 0.4], [0.5, 0.5], [0.3, 0.3, 0.3, 0.1])


def test_conv_counterexample_product_table():
    p = conv_membership(ConvQuery(*COUNTER))
    assert p is not None and certify(p, ConvQuery(*COUNTER))
    prod = np.outer(COUNTER[0], COUNTER[1]).ravel()
    assert np.allclose(np.sort(prod)[::-1], [0.3, 0.3, 0.2, 0.2])
    assert majorizes(prod, COUNTER[2])


def test_conv_point_masses():
    assert conv_membership(ConvQuery([1, 0], [1, 0], [1, 0, 0, 0])) is not None
    assert conv_membership(ConvQuery([1, 0], [1, 0], [0.9, 0.1, 0, 0])) is None
    assert conv_membership(ConvQuery([1, 0], [1, 0], [0.25] * 4)) is None


def test_conv_dimension_mismatch():
    with pytest.raises(DimensionError):
        ConvQuery([1, 0], [1, 0], [0.2] * 5)


def _random_query(gen, da, db):
    pa = np.sort(gen.dirichlet(np.ones(da)))[::-1]
    pb = np.sort(gen.dirichlet(np.ones(db)))[::-1]
    lam = np.sort(gen.dirichlet(np.ones(da * db) * gen.uniform(0.2, 2)))[::-1]
    return ConvQuery(pa, pb, lam)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), da=st.integers(1, 3), db=st.integers(1, 3))
def test_encodings_agree_and_certify(seed, da, db):
    q = _random_query(np.random.default_rng(seed), da, db)
    a = conv_membership(q, encoding="subsets")
    b = conv_membership(q, encoding="aux")
    assert (a is None) == (b is None)
    for p in (a, b):
        if p is not None:
            assert certify(p, q)


def test_feasible_answer_for_realized_marginals():
    # marginals of an actual mixture are always feasible
    base = SeededStream(51)
    for k in range(100):
        s = base.spawn(k)
        lam = np.sort(s.generator.dirichlet(np.ones(4)))[::-1]
        rho = random_mix_with_spectrum(lam, s.generator.dirichlet(np.ones(3)), s)
        rho = DensityMatrix(rho.matrix, (2, 2))
        q = ConvQuery(spectrum(partial_trace(rho, [0])), spectrum(partial_trace(rho, [1])), lam)
        assert conv_membership(q) is not None


def test_separable_witness_examples():
    a, b = diag_state([0.6, 0.4]), diag_state([0.5, 0.5])
    prod = JointDistribution(np.outer([0.6, 0.4], [0.5, 0.5]))
    rho = separable_witness(a, b, prod)
    assert np.allclose(rho.matrix, np.kron(a.matrix, b.matrix))
    p = conv_membership(ConvQuery(*COUNTER))
    rho = separable_witness(a, b, p)
    assert majorizes(spectrum(rho).array(), COUNTER[2])
    with pytest.raises(ContractViolation):
        separable_witness(a, b, JointDistribution([[0.5, 0.0], [0.0, 0.5]]))


def test_separable_witness_round_trip():
    base = SeededStream(52)
    for k in range(100):
        s = base.spawn(k)
        da, db = 2 + k % 2, 2 + (k // 2) % 2
        t = s.generator.dirichlet(np.ones(da * db)).reshape(da, db)
        ra = random_fixed_spectrum(np.sort(t.sum(axis=1))[::-1], s)
        rb = random_fixed_spectrum(np.sort(t.sum(axis=0))[::-1], s)
        # order the table to the decreasing local eigenvalue convention
        t = t[np.argsort(-t.sum(axis=1))][:, np.argsort(-t.sum(axis=0))]
        rho = separable_witness(ra, rb, JointDistribution(t))
        assert np.max(np.abs(partial_trace(rho, [0]).matrix - ra.matrix)) <= 1e-9
        assert np.max(np.abs(partial_trace(rho, [1]).matrix - rb.matrix)) <= 1e-9
        assert np.allclose(spectrum(rho).array(), np.sort(t.ravel())[::-1], atol=1e-8)


def test_diag_distribution_examples():
    rho = DensityMatrix(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex), (2, 2))
    p = diag_distribution(rho, np.eye(2), np.eye(2))
    assert np.allclose(p.table, [[0.4, 0.3], [0.2, 0.1]])
    bell = np.zeros(4)
    bell[[0, 3]] = 2 ** -0.5
    p = diag_distribution(DensityMatrix(np.outer(bell, bell), (2, 2)), np.eye(2), np.eye(2))
    assert np.allclose(p.table, [[0.5, 0], [0, 0.5]])
    assert majorizes(p.table.ravel(), [1, 0, 0, 0])
    with pytest.raises(ContractViolation):
        diag_distribution(rho, np.array([[1, 1], [0, 1]]), np.eye(2))


def test_diag_distribution_majorized_in_mixtures():
    base = SeededStream(53)
    for k in range(300):
        s = base.spawn(k)
        lam = np.sort(s.generator.dirichlet(np.ones(4)))[::-1]
        rho = random_mix_with_spectrum(lam, s.generator.dirichlet(np.ones(1 + k % 4)), s)
        rho = DensityMatrix(rho.matrix, (2, 2))
        p = diag_distribution(rho, random_unitary(2, s), random_unitary(2, s))
        assert majorizes(p.table.ravel(), lam)
        # in the local eigenbases as well
        from meanfield.linalg import eig_hermitian
        va = eig_hermitian(partial_trace(rho, [0]).matrix)[1]
        vb = eig_hermitian(partial_trace(rho, [1]).matrix)[1]
        assert majorizes(diag_distribution(rho, va, vb).table.ravel(), lam)


def test_tripartite_examples():
    a, b, c = (diag_state(v) for v in COUNTER)
    assert tripartite_necessary(a, b, c) == (True, True, True)
    z2, z4 = diag_state([1, 0]), diag_state([1, 0, 0, 0])
    assert tripartite_necessary(z2, z2, z4) == (True, True, True)


def test_tripartite_first_component_breaks():
    # row 1 must carry 0.9 in two cells, but any two cells hold at most 0.7 + 0.1
    a = diag_state([0.9, 0.1])
    c = diag_state([0.7, 0.1, 0.1, 0.1])
    first, _, _ = tripartite_necessary(a, a, c)
    assert first is False
    gen = SeededStream(54).generator
    hits = 0
    for _ in range(200):
        pa = np.sort(gen.dirichlet(np.ones(2)))[::-1]
        pb = np.sort(gen.dirichlet(np.ones(2)))[::-1]
        lam = np.sort(gen.dirichlet(np.ones(4)))[::-1]
        # push lam towards uniform until no table with these marginals fits
        for t in np.linspace(0, 1, 21):
            mix = (1 - t) * lam + t * 0.25
            if conv_membership(ConvQuery(pa, pb, mix)) is None:
                first, _, _ = tripartite_necessary(diag_state(pa), diag_state(pb), diag_state(mix))
                assert first is False
                hits += 1
                break
    assert hits > 50


def test_tripartite_agrees_with_qubit_inequalities_on_grid():
    g = np.linspace(0, 0.5, 50)
    for i, x in enumerate(g):
        for j, y in enumerate(g[: i + 1]):
            for z in g[: j + 1]:
                r = tripartite_necessary(diag_state([1 - x, x]), diag_state([1 - y, y]), diag_state([1 - z, z]))
                assert all(r) == check_pure_compat_qubits([x, y, z])
