"""Undirected simple graphs on vertices ``0..n-1``.

Edges are stored sorted as ``(i, j)`` with ``i < j``; the position of an edge
in that list is its coordinate in GF(2)^m, shared by every module that builds
incidence vectors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "UGraph",
    "Peo",
    "cyclomatic_number",
    "bfs_tree",
    "bfs_shortest_path",
    "is_perfect_elimination_ordering",
    "make_peo",
    "lex_bfs_order",
    "lex_bfs_peo",
    "peo_spanning_forest",
    "random_chordal_graph",
    "cycle_graph",
    "complete_graph",
    "path_graph",
]


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class UGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise InputError("negative vertex count")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise InputError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InputError(f"edge ({i}, {j}) out of range for n={self.n}")
            if i > j:
                raise InputError("edges must be stored as (i, j) with i < j")
            if (i, j) in seen:
                raise InputError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        if list(self.edges) != sorted(self.edges):
            raise InputError("edges must be sorted")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "UGraph":
        """Normalize orientation and order; duplicates and loops still raise."""
        norm = [_edge(int(i), int(j)) for i, j in edges]
        if len(set(norm)) != len(norm):
            raise InputError("duplicate edge")
        return cls(n, tuple(sorted(norm)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def _adjacency_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and j in self._adjacency_sets[i]

    def index_of(self, i: int, j: int) -> int:
        try:
            return self.edge_index[_edge(i, j)]
        except KeyError:
            raise InputError(f"({i}, {j}) is not an edge") from None

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def induced_edges(self, S: Iterable[int]) -> list[tuple[int, int]]:
        vs = sorted(set(S))
        return [(a, b) for k, a in enumerate(vs) for b in vs[k + 1:] if self.has_edge(a, b)]

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components (union-find), each sorted, ordered by least vertex."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return tuple(tuple(g) for _, g in sorted(groups.items()))

    @property
    def n_components(self) -> int:
        return len(self.components)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=int)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def edge_set(self) -> frozenset:
        return frozenset(self.edges)


def cyclomatic_number(G: UGraph) -> int:
    return G.m - G.n + G.n_components


def bfs_tree(G: UGraph, root: int) -> tuple[list[int], list[int]]:
    """BFS distances and predecessors from ``root`` (-1 where unreachable).

    The predecessor of ``w`` is its smallest-index neighbor one level closer
    to the root, so the tree does not depend on queue order.
    """
    dist = [-1] * G.n
    dist[root] = 0
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in G.adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    pred = [-1] * G.n
    for w in range(G.n):
        if dist[w] > 0:
            pred[w] = min(x for x in G.adjacency[w] if dist[x] == dist[w] - 1)
    return dist, pred


def _path_from_tree(pred: list[int], root: int, v: int) -> list[int]:
    path = [v]
    while path[-1] != root:
        path.append(pred[path[-1]])
    path.reverse()
    return path


def bfs_shortest_path(G: UGraph, u: int, v: int) -> list[int] | None:
    """A shortest ``u``-``v`` vertex path, or ``None`` when unreachable."""
    for x in (u, v):
        if not 0 <= x < G.n:
            raise InputError(f"vertex {x} out of range")
    dist, pred = bfs_tree(G, u)
    if dist[v] < 0:
        return None
    return _path_from_tree(pred, u, v)


@dataclass(frozen=True)
class Peo:
    """A perfect elimination ordering plus the ``v -> v*`` map.

    ``star[v]`` is the earliest neighbor of ``v`` placed after it, or -1.
    """

    order: tuple[int, ...]
    position: tuple[int, ...] = field(repr=False)
    star: tuple[int, ...] = field(repr=False)


def is_perfect_elimination_ordering(G: UGraph, order: Sequence[int]) -> bool:
    if sorted(order) != list(range(G.n)):
        return False
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        later = [w for w in G.adjacency[v] if pos[w] > pos[v]]
        for a in range(len(later)):
            for b in range(a + 1, len(later)):
                if not G.has_edge(later[a], later[b]):
                    return False
    return True


def make_peo(G: UGraph, order: Sequence[int]) -> Peo:
    """Wrap a verified elimination ordering; raises on an invalid one."""
    if not is_perfect_elimination_ordering(G, order):
        raise InputError(f"{tuple(order)} is not a perfect elimination ordering")
    position = [0] * G.n
    for k, v in enumerate(order):
        position[v] = k
    star = []
    for v in range(G.n):
        later = [w for w in G.adjacency[v] if position[w] > position[v]]
        star.append(min(later, key=lambda w: position[w]) if later else -1)
    return Peo(tuple(order), tuple(position), tuple(star))


def lex_bfs_order(G: UGraph) -> list[int]:
    """Lexicographic BFS visit order by partition refinement.

    Ties are broken toward the smallest vertex index.
    """
    partition = [list(range(G.n))] if G.n else []
    order = []
    while partition:
        v = partition[0].pop(0)
        if not partition[0]:
            partition.pop(0)
        order.append(v)
        nbrs = G._adjacency_sets[v]
        refined = []
        for block in partition:
            inside = [w for w in block if w in nbrs]
            outside = [w for w in block if w not in nbrs]
            refined.extend(part for part in (inside, outside) if part)
        partition = refined
    return order


def lex_bfs_peo(G: UGraph) -> Peo | None:
    """A PEO (reverse Lex-BFS order) if ``G`` is chordal, else ``None``."""
    order = lex_bfs_order(G)[::-1]
    if not is_perfect_elimination_ordering(G, order):
        return None
    return make_peo(G, order)


def peo_spanning_forest(G: UGraph, peo: Peo) -> UGraph:
    """The forest of edges ``{v, v*}``; it spans every component of ``G``."""
    if not is_perfect_elimination_ordering(G, peo.order):
        raise InputError("invalid perfect elimination ordering")
    edges = [_edge(v, peo.star[v]) for v in range(G.n) if peo.star[v] >= 0]
    return UGraph.from_edges(G.n, edges)


def cycle_graph(n: int) -> UGraph:
    return UGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> UGraph:
    return UGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> UGraph:
    return UGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_chordal_graph(n: int, rng: np.random.Generator, p_attach: float = 0.9,
                         max_clique: int = 4) -> UGraph:
    """Random chordal graph grown by simplicial vertex insertion.

    Each new vertex attaches (with probability ``p_attach``) to a random clique
    of the current graph, so the reversed insertion order is a PEO.
    """
    edges: list[tuple[int, int]] = []
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for v in range(1, n):
        if rng.random() >= p_attach:
            continue
        u = int(rng.integers(v))
        clique = [u]
        candidates = [int(w) for w in rng.permutation(sorted(nbrs[u]))]
        size = int(rng.integers(1, max_clique + 1))
        for w in candidates:
            if len(clique) >= size:
                break
            if all(w in nbrs[c] for c in clique):
                clique.append(w)
        for c in clique:
            edges.append(_edge(c, v))
            nbrs[c].add(v)
            nbrs[v].add(c)
    return UGraph.from_edges(n, edges)
