import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itrich import _kernels
from itrich.graph import Graph, GraphError
from itrich.nullmodel import (build_ensemble, configuration_rewire, null_sample, shuffle_weights,
                              write_sample)
from itrich.weights import compute_weighted_graph


def gnp(n, p, seed):
    return Graph.from_edges(n, list(nx.gnp_random_graph(n, p, seed=seed).edges()))


def _edge_set(edges):
    return {tuple(e) for e in np.asarray(edges).tolist()}


@settings(max_examples=40, deadline=None)
@given(st.integers(6, 60), st.floats(0.1, 0.7), st.integers(0, 10_000))
def test_rewire_preserves_degrees_and_simplicity(n, p, seed):
    g = gnp(n, p, seed)
    if g.m < 2:
        return
    h = configuration_rewire(g, seed)
    assert h.degrees.tolist() == g.degrees.tolist()
    assert h.m == g.m
    assert np.all(h.edges[:, 0] < h.edges[:, 1])
    assert len(_edge_set(h.edges)) == h.m


@settings(max_examples=30, deadline=None)
@given(st.integers(6, 40), st.floats(0.2, 0.8), st.integers(0, 10_000))
def test_sample_preserves_weight_multiset(n, p, seed):
    wg = compute_weighted_graph(gnp(n, p, seed))
    if wg.base.m < 2:
        return
    s = null_sample(wg, seed)
    assert sorted(s.weight.tolist()) == sorted(wg.weight.tolist())
    assert np.bincount(s.edges.ravel(), minlength=n).tolist() == wg.base.degrees.tolist()


@pytest.mark.parametrize("g", [
    Graph.from_edges(6, [(0, i) for i in range(1, 6)]),                       # star
    Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]),                            # triangle
    Graph.from_edges(6, [(i, j) for i in range(6) for j in range(i + 1, 6)]),  # K6
])
def test_rigid_graphs_unchanged(g):
    assert _edge_set(configuration_rewire(g, 1).edges) == _edge_set(g.edges)


def test_single_edge_rejected():
    with pytest.raises(GraphError):
        configuration_rewire(Graph.from_edges(3, [(0, 1)]), 0)


def test_deterministic_per_seed():
    wg = compute_weighted_graph(gnp(40, 0.3, 2))
    a, b, c = null_sample(wg, 5), null_sample(wg, 5), null_sample(wg, 6)
    assert np.array_equal(a.edges, b.edges) and np.array_equal(a.weight, b.weight)
    assert not np.array_equal(a.edges, c.edges)


def test_ensemble_independent_of_size():
    wg = compute_weighted_graph(gnp(30, 0.3, 4))
    small, big = build_ensemble(wg, 3, 9), build_ensemble(wg, 6, 9)
    for x, y in zip(small, big):
        assert np.array_equal(x.edges, y.edges) and np.array_equal(x.weight, y.weight)


def test_shuffle_weights_size_mismatch():
    g = gnp(10, 0.5, 1)
    with pytest.raises(GraphError):
        shuffle_weights(g, np.ones(g.m + 1), 0)


def _swap_inputs(n, p, seed, attempts_per_edge=10):
    g = gnp(n, p, seed)
    gen = np.random.default_rng(seed)
    picks = gen.integers(0, g.m, size=(attempts_per_edge * g.m, 2))
    flips = gen.integers(0, 2, size=len(picks)).astype(np.bool_)
    return g, picks, flips


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("n,p", [(50, 0.2), (200, 0.05)])
def test_backends_agree_dense_path(n, p):
    g, picks, flips = _swap_inputs(n, p, 3)
    a, b = np.array(g.edges), np.array(g.edges)
    ka = _kernels.double_edge_swap_numba(n, a, picks, flips)
    kb = _kernels.double_edge_swap_numpy(n, b, picks, flips)
    assert ka == kb and np.array_equal(a, b)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree_sparse_path():
    n = _kernels.DENSE_SWAP_LIMIT + 500
    gen = np.random.default_rng(0)
    raw = gen.integers(0, n, size=(3 * n, 2))
    raw = raw[raw[:, 0] != raw[:, 1]]
    g = Graph.from_edges(n, raw)
    picks = gen.integers(0, g.m, size=(2 * g.m, 2))
    flips = gen.integers(0, 2, size=len(picks)).astype(np.bool_)
    a, b = np.array(g.edges), np.array(g.edges)
    assert _kernels.double_edge_swap_numba(n, a, picks, flips) == \
        _kernels.double_edge_swap_numpy(n, b, picks, flips)
    assert np.array_equal(a, b)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree_common_neighbors_and_cores():
    g = gnp(120, 0.1, 8)
    cn1 = _kernels.common_neighbors_numba(g.n, g.edges, g.indptr, g.indices)
    cn2 = _kernels.common_neighbors_numpy(g.n, g.edges, g.indptr, g.indices)
    assert np.array_equal(np.asarray(cn1, dtype=np.int64), np.asarray(cn2, dtype=np.int64))
    c1 = _kernels.core_numbers_numba(g.n, g.indptr, g.indices)
    c2 = _kernels.core_numbers_numpy(g.n, g.indptr, g.indices)
    assert np.array_equal(c1, c2)


def test_null_breaks_degree_correlations():
    # two disjoint cliques of different size: assortative; rewiring must mix them
    a = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    b = [(10 + i, 10 + j) for i in range(5) for j in range(i + 1, 5)]
    path = [(15 + i, 16 + i) for i in range(20)]
    g = Graph.from_edges(36, a + b + path)
    before = nx.degree_assortativity_coefficient(nx.Graph(g.edges.tolist()))
    after = np.mean([nx.degree_assortativity_coefficient(
        nx.Graph(configuration_rewire(g, s).edges.tolist())) for s in range(20)])
    assert before > 0.5 and after < before - 0.3


def test_null_decorrelates_weights_from_topology():
    wg = compute_weighted_graph(gnp(80, 0.15, 1))
    # in the real graph weight tracks common neighbours exactly; after the shuffle it should not
    cn = _kernels.common_neighbors(wg.n, wg.base.edges, wg.base.indptr, wg.base.indices)
    assert np.corrcoef(cn, wg.weight)[0, 1] > 0.9
    s = null_sample(wg, 3)
    h = s.graph()
    cn_null = _kernels.common_neighbors(h.n, h.edges, h.indptr, h.indices)
    order = np.lexsort((s.edges[:, 1], s.edges[:, 0]))
    assert abs(np.corrcoef(cn_null, s.weight[order])[0, 1]) < 0.3


def test_write_sample(tmp_path):
    wg = compute_weighted_graph(gnp(10, 0.5, 1))
    s = null_sample(wg, 0)
    write_sample(s, wg.base.labels, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "node_i,node_j,weight" and len(lines) == wg.base.m + 1
