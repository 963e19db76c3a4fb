import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dppmom.errors import InputError
from dppmom.graph import (UGraph, bfs_shortest_path, bfs_tree, complete_graph, cycle_graph,
                          cyclomatic_number, is_perfect_elimination_ordering, lex_bfs_order,
                          lex_bfs_peo, make_peo, path_graph, peo_spanning_forest,
                          random_chordal_graph)
from oracles import floyd_warshall, is_chordal_nx

graphs = st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                        .filter(lambda e: e[0] != e[1]).map(lambda e: tuple(sorted(e))),
                        max_size=n * (n - 1) // 2)))


def test_ugraph_validation():
    G = UGraph.from_edges(3, [(2, 1), (0, 1)])
    assert G.edges == ((0, 1), (1, 2))
    assert G.index_of(2, 1) == 1
    assert G.degree(1) == 2
    with pytest.raises(InputError):
        UGraph.from_edges(3, [(0, 0)])
    with pytest.raises(InputError):
        UGraph.from_edges(3, [(0, 3)])
    with pytest.raises(InputError):
        UGraph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InputError):
        G.index_of(0, 2)


def test_cyclomatic_examples():
    assert cyclomatic_number(path_graph(3)) == 0
    assert cyclomatic_number(cycle_graph(4)) == 1
    assert cyclomatic_number(complete_graph(4)) == 3
    two = UGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert cyclomatic_number(two) == 2 and two.n_components == 2


def test_shortest_path_examples():
    C5 = cycle_graph(5)
    assert bfs_shortest_path(C5, 0, 2) == [0, 1, 2]
    assert bfs_shortest_path(C5, 3, 3) == [3]
    G = UGraph.from_edges(4, [(0, 1), (2, 3)])
    assert bfs_shortest_path(G, 0, 3) is None


@settings(max_examples=100, deadline=None)
@given(graphs)
def test_bfs_distances_match_floyd_warshall(g):
    n, edges = g
    G = UGraph.from_edges(n, edges)
    D = floyd_warshall(n, edges)
    for root in range(n):
        dist, pred = bfs_tree(G, root)
        for v in range(n):
            if np.isinf(D[root, v]):
                assert dist[v] == -1
                continue
            assert dist[v] == D[root, v]
            path = bfs_shortest_path(G, root, v)
            assert len(path) - 1 == D[root, v]
            assert all(G.has_edge(a, b) for a, b in zip(path, path[1:]))


def test_lex_bfs_examples():
    tri = complete_graph(3)
    for order in itertools.permutations(range(3)):
        assert is_perfect_elimination_ordering(tri, order)
    P3 = path_graph(3)
    peo = lex_bfs_peo(P3)
    assert peo is not None and is_perfect_elimination_ordering(P3, peo.order)
    assert is_perfect_elimination_ordering(P3, (0, 2, 1))
    assert not is_perfect_elimination_ordering(P3, (1, 0, 2))
    assert lex_bfs_peo(cycle_graph(4)) is None


def test_make_peo_rejects_invalid_order():
    with pytest.raises(InputError):
        make_peo(path_graph(3), (1, 0, 2))


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_lex_bfs_agrees_with_networkx_chordality(g):
    n, edges = g
    G = UGraph.from_edges(n, edges)
    order = lex_bfs_order(G)
    assert sorted(order) == list(range(n))
    peo = lex_bfs_peo(G)
    assert (peo is not None) == is_chordal_nx(n, edges)
    if peo is not None:
        assert is_perfect_elimination_ordering(G, peo.order)


def test_spanning_forest_examples():
    tri = complete_graph(3)
    F = peo_spanning_forest(tri, make_peo(tri, (0, 1, 2)))
    assert F.edges == ((0, 1), (1, 2))
    tree = UGraph.from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert peo_spanning_forest(tree, lex_bfs_peo(tree)).edges == tree.edges
    two = UGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    F = peo_spanning_forest(two, lex_bfs_peo(two))
    assert F.m == 4 and F.n_components == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 14), st.integers(0, 2**32 - 1))
def test_random_chordal_graphs_and_their_forests(n, seed):
    G = random_chordal_graph(n, np.random.default_rng(seed))
    assert is_chordal_nx(n, G.edges)
    peo = lex_bfs_peo(G)
    assert peo is not None
    F = peo_spanning_forest(G, peo)
    assert F.m == n - G.n_components
    assert cyclomatic_number(F) == 0
    assert F.n_components == G.n_components
    assert F.edge_set() <= G.edge_set()


@pytest.mark.parametrize("k", range(4, 10))
def test_long_cycles_are_not_chordal(k):
    assert lex_bfs_peo(cycle_graph(k)) is None


def test_components_and_adjacency_matrix():
    G = UGraph.from_edges(5, [(0, 3), (1, 2)])
    assert G.components == ((0, 3), (1, 2), (4,))
    A = G.adjacency_matrix()
    assert A[0, 3] == A[3, 0] == 1 and A.sum() == 4
    assert G.induced_edges([0, 1, 3]) == [(0, 3)]
