"""Shortest maximal cycle bases via Horton's candidate set.

Candidates are the cycles ``P(v, x) + {x, y} + P(y, v)`` built from one BFS
tree per root ``v``; a greedy pass in order of increasing length keeps every
candidate independent (over GF(2)) of those already kept.  The result has
minimum total length, hence also minimum maximal length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError, NumericError
from .gf2 import EchelonBasis, Gf2Vector, rank_increment
from .graph import UGraph, _path_from_tree, bfs_tree, cyclomatic_number

__all__ = ["Cycle", "CycleBasis", "horton_candidates", "shortest_maximal_cycle_basis",
           "cycle_sparsity", "is_induced"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cycle:
    """A simple cycle: its vertices in cyclic order and its edge incidence vector."""

    vertices: tuple[int, ...]
    incidence: Gf2Vector = field(compare=False)

    @classmethod
    def from_vertices(cls, G: UGraph, vertices: Sequence[int]) -> "Cycle":
        vs = tuple(int(v) for v in vertices)
        k = len(vs)
        if k < 3 or len(set(vs)) != k:
            raise InputError(f"{vs} is not a simple cycle")
        bits = 0
        for t in range(k):
            bits |= 1 << G.index_of(vs[t], vs[(t + 1) % k])
        return cls(_canonical_rotation(vs), Gf2Vector(G.m, bits))

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        k = len(self.vertices)
        return [tuple(sorted((self.vertices[t], self.vertices[(t + 1) % k]))) for t in range(k)]


def _canonical_rotation(vs: tuple[int, ...]) -> tuple[int, ...]:
    k = len(vs)
    s = vs.index(min(vs))
    fwd = vs[s:] + vs[:s]
    back = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, back)


def is_induced(G: UGraph, cycle: Cycle) -> bool:
    """True iff no chord joins two non-consecutive cycle vertices."""
    return len(G.induced_edges(cycle.vertices)) == cycle.length


@dataclass(frozen=True)
class CycleBasis:
    cycles: tuple[Cycle, ...]
    nu: int
    chorded: bool = False  # set only when the induced-cycle filter had to be dropped

    @property
    def sparsity(self) -> int:
        return max((c.length for c in self.cycles), default=2)

    def __len__(self):
        return len(self.cycles)

    def total_length(self) -> int:
        return sum(c.length for c in self.cycles)


def horton_candidates(G: UGraph) -> list[Cycle]:
    """Deduplicated Horton candidates, sorted by (length, edge indices)."""
    found: dict[int, Cycle] = {}
    for v in range(G.n):
        dist, pred = bfs_tree(G, v)
        for x, y in G.edges:
            if dist[x] < 0:
                continue
            px = _path_from_tree(pred, v, x)
            py = _path_from_tree(pred, v, y)
            if set(px) & set(py) != {v}:
                continue
            vertices = px + py[:0:-1]
            if len(vertices) < 3:
                continue
            c = Cycle.from_vertices(G, vertices)
            found.setdefault(c.incidence.bits, c)
    return sorted(found.values(), key=lambda c: (c.length, c.incidence.support()))


def _greedy(cands: list[Cycle], m: int, nu: int) -> list[Cycle]:
    acc = EchelonBasis(m)
    kept = []
    for c in cands:
        if len(kept) == nu:
            break
        if rank_increment(acc, c.incidence):
            kept.append(c)
    return kept


def shortest_maximal_cycle_basis(G: UGraph) -> CycleBasis:
    """Minimum-total-length basis made of induced cycles.

    Chorded candidates are dropped before the greedy pass.  Should that ever
    leave too few independent cycles, the unfiltered candidates are used and
    the basis is flagged ``chorded``.
    """
    nu = cyclomatic_number(G)
    if nu == 0:
        return CycleBasis((), 0)
    cands = horton_candidates(G)
    kept = _greedy([c for c in cands if is_induced(G, c)], G.m, nu)
    chorded = False
    if len(kept) < nu:
        log.warning("induced Horton candidates span only %d of %d dimensions; "
                    "falling back to chorded candidates", len(kept), nu)
        kept = _greedy(cands, G.m, nu)
        chorded = True
    if len(kept) < nu:
        raise NumericError(f"Horton candidates span {len(kept)} < nu={nu} dimensions")
    return CycleBasis(tuple(kept), nu, chorded)


def cycle_sparsity(G: UGraph) -> int:
    return shortest_maximal_cycle_basis(G).sparsity
