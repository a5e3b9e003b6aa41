import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plsat import kernels
from plsat.weights import build_concrete, distribution

from conftest import random_formula

BACKENDS = kernels.available()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def test_pure_backend_always_available():
    assert "pure" in BACKENDS
    assert kernels.get("pure").NAME == "pure"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_alias_table_reproduces_distribution(backend):
    p = np.array([0.1, 0.2, 0.3, 0.4])
    prob, alias = backend.build_alias(p)
    n = len(p)
    recon = prob / n
    for i in range(n):
        recon[alias[i]] += (1 - prob[i]) / n
    assert np.allclose(recon, p, atol=1e-15)


def test_sample_rows_canonical(backend):
    vd = distribution(build_concrete(30, 2.5))
    prob, alias = backend.build_alias(vd.p)
    lits, attempts = backend.sample_clauses(prob, alias, 2000, 3, 11, 0)
    lits = np.asarray(lits).reshape(2000, 3)
    var = np.abs(lits)
    assert np.all(np.diff(var, axis=1) > 0)
    assert var.min() >= 1 and var.max() <= 30
    assert attempts >= 2000


@needs_both
def test_alias_parity():
    p = distribution(build_concrete(1000, 2.3)).p
    a = kernels.get("pure").build_alias(p)
    b = kernels.get("compiled").build_alias(p)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@needs_both
@settings(max_examples=25, deadline=None)
@given(n=st.integers(5, 200), k=st.integers(1, 4), m=st.integers(0, 300),
       seed=st.integers(0, 2 ** 64 - 1), start=st.integers(0, 1000),
       beta=st.floats(2.05, 4.0))
def test_sampling_parity(n, k, m, seed, start, beta):
    vd = distribution(build_concrete(n, beta))
    pure, comp = kernels.get("pure"), kernels.get("compiled")
    prob, alias = pure.build_alias(vd.p)
    la, aa = pure.sample_clauses(prob, alias, m, k, seed, start)
    lb, ab = comp.sample_clauses(prob, alias, m, k, seed, start)
    assert np.array_equal(np.asarray(la).ravel(), np.asarray(lb).ravel())
    assert aa == ab


@needs_both
def test_chunked_sampling_matches_whole(backend):
    vd = distribution(build_concrete(100, 2.5))
    prob, alias = backend.build_alias(vd.p)
    whole, _ = backend.sample_clauses(prob, alias, 500, 3, 5, 0)
    head, _ = backend.sample_clauses(prob, alias, 200, 3, 5, 0)
    tail, _ = backend.sample_clauses(prob, alias, 300, 3, 5, 200)
    assert np.array_equal(np.asarray(whole).reshape(-1, 3),
                          np.concatenate([np.asarray(head).reshape(-1, 3), np.asarray(tail).reshape(-1, 3)]))


def _csr(num, edges):
    edges = sorted(edges)
    indptr = np.zeros(num + 1, dtype=np.int64)
    for u, _ in edges:
        indptr[u + 1] += 1
    return np.cumsum(indptr), np.array([v for _, v in edges], dtype=np.int64)


def test_scc_small_graph(backend):
    # 0 <-> 1 -> 2 <-> 3, 4 isolated
    indptr, indices = _csr(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)])
    comp = np.asarray(backend.scc(5, indptr, indices))
    assert comp[0] == comp[1] and comp[2] == comp[3]
    assert len({comp[0], comp[2], comp[4]}) == 3
    # reverse topological numbering: the sink component is finished first
    assert comp[2] < comp[0]


@needs_both
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=80))))
def test_scc_parity(graph):
    n, edges = graph
    indptr, indices = _csr(n, edges)
    a = np.asarray(kernels.get("pure").scc(n, indptr, indices))
    b = np.asarray(kernels.get("compiled").scc(n, indptr, indices))
    assert np.array_equal(a, b)


@needs_both
def test_dpll_parity(rng):
    pure, comp = kernels.get("pure"), kernels.get("compiled")
    for _ in range(300):
        n = int(rng.integers(3, 12))
        k = int(rng.integers(2, 4))
        f = random_formula(rng, n, int(rng.integers(1, 5 * n)), k)
        order = np.arange(n, 0, -1)
        for phase in (0, 1):
            a = pure.dpll(n, f.clauses.ravel(), k, order, phase, -1)
            b = comp.dpll(n, f.clauses.ravel(), k, order, phase, -1)
            assert a[0] == b[0] and a[2] == b[2] and a[3] == b[3]
            if a[0] == 1:
                assert np.array_equal(np.asarray(a[1]), np.asarray(b[1]))
