import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itrich.graph import (Graph, GraphError, common_neighbors, degree, induced_subgraph,
                          k_shell_decomposition, load_attributes, load_edge_list, save_edge_list)


def _write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_dedups_reversed_and_repeated(tmp_path):
    g = load_edge_list(_write(tmp_path, "# comment\na b\nb a\na b\nb c\n\n"))
    assert g.n == 3 and g.m == 2
    assert g.labels == ("a", "b", "c")
    assert degree(g, g.index_of("b")) == 2


def test_load_csv_and_extra_columns(tmp_path):
    g = load_edge_list(_write(tmp_path, "1,2,0.5\n2,3,1\n", "g.csv"), format="csv")
    assert g.m == 2 and g.labels == ("1", "2", "3")


def test_self_loop_reports_line(tmp_path):
    with pytest.raises(GraphError, match=r":2: self-loop on node 'x'"):
        load_edge_list(_write(tmp_path, "x y\nx x\n"))


def test_short_line_rejected(tmp_path):
    with pytest.raises(GraphError, match="expected two node tokens"):
        load_edge_list(_write(tmp_path, "x\n"))


def test_round_trip(tmp_path):
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)])
    p = tmp_path / "out.txt"
    save_edge_list(g, p)
    h = load_edge_list(p)
    as_set = lambda gr: {frozenset((gr.labels[a], gr.labels[b])) for a, b in gr.edges.tolist()}
    assert as_set(g) == as_set(h)


def test_attributes_header_and_unknown(tmp_path):
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    ga = load_attributes(g, _write(tmp_path, "node,party\n0,L\n1,R\n2,L\n", "a.csv"))
    assert ga.node_attrs == {0: "L", 1: "R", 2: "L"}
    with pytest.raises(GraphError, match="unknown node"):
        load_attributes(g, _write(tmp_path, "0,L\n9,R\n", "b.csv"))


def test_common_neighbors_triangle_pendant():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)])
    assert common_neighbors(g, 1, 2) == 1
    assert common_neighbors(g, 0, 3) == 0
    with pytest.raises(GraphError):
        common_neighbors(g, 1, 1)


def test_edges_are_readonly():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.edges[0, 0] = 2


def test_induced_subgraph_relabels_in_order():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], list("abcde"))
    sub, ids = induced_subgraph(g, [4, 2, 3])
    assert ids.tolist() == [2, 3, 4]
    assert sub.labels == ("c", "d", "e")
    assert sub.edges.tolist() == [[0, 1], [1, 2]]


def _brute_core_numbers(g):
    # repeatedly strip nodes of degree < k
    core = np.zeros(g.n, dtype=int)
    alive = set(range(g.n))
    adj = {i: set(g.neighbors(i).tolist()) for i in range(g.n)}
    k = 0
    while alive:
        k += 1
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                if len(adj[v] & alive) < k:
                    alive.discard(v)
                    core[v] = k - 1
                    changed = True
    return core


def test_kshell_examples():
    clique = Graph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    assert k_shell_decomposition(clique).core_number.tolist() == [4] * 5
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    ks = k_shell_decomposition(star)
    assert ks.core_number.tolist() == [1] * 5
    assert ks.k_core(2) == frozenset()
    tp = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)])
    assert k_shell_decomposition(tp).core_number.tolist() == [2, 2, 2, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 40), st.floats(0.05, 0.6), st.integers(0, 10_000))
def test_kshell_matches_oracles(n, p, seed):
    G = nx.gnp_random_graph(n, p, seed=seed)
    g = Graph.from_edges(n, list(G.edges()))
    ours = k_shell_decomposition(g).core_number
    assert ours.tolist() == _brute_core_numbers(g).tolist()
    ref = nx.core_number(G)
    assert ours.tolist() == [ref[i] for i in range(n)]


def test_examples_dir_edge_lists_parse(tmp_path):
    # isolated node labels only appear through edges; a disconnected file still loads
    g = load_edge_list(_write(tmp_path, "1 2\n3 4\n"))
    assert g.n == 4 and g.m == 2
