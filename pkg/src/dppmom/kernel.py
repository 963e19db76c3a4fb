"""DPP kernels: induced graphs, sign-flip similarity, the rho pseudo-distance,
cycle signs, subset probabilities and the matchings expansion of
induced-cycle minors.

Index sets are iterables of 0-based vertex indices.  Subsets in probability
tables are addressed by bitmask (bit ``i`` set iff vertex ``i`` is present).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapabilityError, InputError
from .graph import UGraph
from .linalg import (as_symmetric, batched_determinant, determinant, is_valid_kernel,
                     principal_submatrix)

__all__ = [
    "Kernel",
    "SignAssignment",
    "induced_graph",
    "dn_conjugate",
    "rho",
    "rho_parity",
    "RHO_ENUM_CAP",
    "minor",
    "subset_probability",
    "subset_probability_table",
    "mask_of",
    "subset_of_mask",
    "cycle_matchings",
    "induced_cycle_minor_expansion",
    "cycle_sign",
    "MATCHING_CAP",
]

KERNEL_TOL = 1e-9
RHO_ENUM_CAP = 24
MATCHING_CAP = 16


@dataclass(frozen=True, eq=False)
class Kernel:
    """Symmetric matrix parametrizing a DPP, with optional separation ``alpha``.

    ``checked=False`` skips the spectrum and separation checks; estimated
    kernels use it because nothing forces them into the PSD cone.
    """

    matrix: np.ndarray
    alpha: float | None = None
    checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_symmetric(self.matrix))
        self.matrix.setflags(write=False)
        if not self.checked:
            return
        if not is_valid_kernel(self.matrix, KERNEL_TOL):
            raise InputError("kernel spectrum is not inside [0, 1]")
        if self.alpha is not None:
            if not 0 < self.alpha < 1:
                raise InputError("alpha must lie in (0, 1)")
            off = np.abs(self.matrix[np.triu_indices(self.N, 1)])
            bad = off[(off != 0) & (off < self.alpha * (1 - 1e-12))]
            if bad.size:
                raise InputError(f"entry of magnitude {bad.min():.3g} violates alpha={self.alpha}")

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def unchecked(cls, matrix, alpha: float | None = None) -> "Kernel":
        return cls(matrix, alpha, checked=False)

    def __getitem__(self, ij):
        return self.matrix[ij]


@dataclass(frozen=True)
class SignAssignment:
    """One sign in {+1, -1} per edge of ``graph``, aligned with its edge order."""

    graph: UGraph
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != self.graph.m:
            raise InputError("one sign per edge is required")
        if any(s not in (1, -1) for s in self.signs):
            raise InputError("signs must be +1 or -1")

    def sign(self, i: int, j: int) -> int:
        return self.signs[self.graph.index_of(i, j)]

    @classmethod
    def from_kernel(cls, K: Kernel, graph: UGraph | None = None) -> "SignAssignment":
        graph = induced_graph(K) if graph is None else graph
        return cls(graph, tuple(1 if K.matrix[i, j] > 0 else -1 for i, j in graph.edges))

    def agrees_up_to_flips(self, other: "SignAssignment") -> bool:
        """True iff the two assignments differ by a vertex sign-flip pattern.

        Equivalently, the disagreement vector lies in the cut space: it is a
        consistent 2-coloring problem, solved by propagation.
        """
        if other.graph.edge_set() != self.graph.edge_set():
            return False
        g = self.graph
        flip = {e: a != other.sign(*e) for e, a in zip(g.edges, self.signs)}
        color = [-1] * g.n
        for root in range(g.n):
            if color[root] >= 0:
                continue
            color[root] = 0
            stack = [root]
            while stack:
                x = stack.pop()
                for y in g.adjacency[x]:
                    want = color[x] ^ flip[(min(x, y), max(x, y))]
                    if color[y] < 0:
                        color[y] = want
                        stack.append(y)
                    elif color[y] != want:
                        return False
        return True


def induced_graph(K: Kernel) -> UGraph:
    """Edges wherever an off-diagonal entry is exactly nonzero."""
    i, j = np.nonzero(np.triu(K.matrix, 1))
    return UGraph(K.N, tuple(zip(i.tolist(), j.tolist())))


def dn_conjugate(K: Kernel, signs: Sequence[int]) -> Kernel:
    s = np.asarray(signs, dtype=float)
    if s.shape != (K.N,) or not np.all(np.abs(s) == 1):
        raise InputError("need one +1/-1 sign per vertex")
    return Kernel(K.matrix * np.outer(s, s), K.alpha, checked=False)


def _as_matrix(K) -> np.ndarray:
    return K.matrix if isinstance(K, Kernel) else np.asarray(K, dtype=float)


def rho(K: Kernel, K2: Kernel, chunk: int = 1 << 15) -> float:
    """min over diagonal sign matrices D of max |DKD - K2|, by enumeration.

    The first sign is pinned to +1 (D and -D act identically), leaving
    2^(N-1) candidates.  Above ``RHO_ENUM_CAP`` use :func:`rho_parity`.
    """
    a, b = _as_matrix(K), _as_matrix(K2)
    if a.shape != b.shape:
        raise InputError("kernels have different dimensions")
    n = a.shape[0]
    if n > RHO_ENUM_CAP:
        raise CapabilityError(f"exact rho enumeration capped at N={RHO_ENUM_CAP}; use rho_parity")
    diag = float(np.max(np.abs(np.diag(a) - np.diag(b))))
    if n == 1:
        return diag
    iu, ju = np.triu_indices(n, 1)
    ka, kb = a[iu, ju], b[iu, ju]
    best = np.inf
    total = 1 << (n - 1)
    shifts = np.arange(n - 1)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total))
        bits = (codes[:, None] >> shifts) & 1
        s = np.ones((codes.size, n))
        s[:, 1:] = 1 - 2 * bits
        dev = np.abs(s[:, iu] * s[:, ju] * ka - kb).max(axis=1)
        best = min(best, float(dev.min()))
    return max(diag, best)


def _parity_feasible(n: int, constraints: list[tuple[int, int, int]]) -> bool:
    """Can vertices get bits with b_i xor b_j == p for every (i, j, p)?"""
    parent = list(range(n))
    par = [0] * n  # parity to parent

    def find(x):
        p = 0
        while parent[x] != x:
            p ^= par[x]
            x = parent[x]
        return x, p

    for i, j, p in constraints:
        (ri, pi), (rj, pj) = find(i), find(j)
        if ri == rj:
            if pi ^ pj != p:
                return False
        else:
            parent[ri] = rj
            par[ri] = pi ^ pj ^ p
    return True


def rho_parity(K: Kernel, K2: Kernel) -> float:
    """Exact rho at any size via the smallest feasible threshold.

    For threshold t every pair (i, j) allows s_i s_j = +1, -1, both or
    neither; feasibility is a parity-constraint (2-coloring) check, and the
    optimum is one of the values |K_ij -+ K2_ij|, found by bisection.
    """
    a, b = _as_matrix(K), _as_matrix(K2)
    if a.shape != b.shape:
        raise InputError("kernels have different dimensions")
    n = a.shape[0]
    diag = float(np.max(np.abs(np.diag(a) - np.diag(b))))
    iu, ju = np.triu_indices(n, 1)
    plus = np.abs(a[iu, ju] - b[iu, ju])   # cost if s_i s_j = +1
    minus = np.abs(a[iu, ju] + b[iu, ju])  # cost if s_i s_j = -1
    candidates = np.unique(np.concatenate([plus, minus, [0.0]]))

    def feasible(t):
        cons = []
        for i, j, cp, cm in zip(iu, ju, plus, minus):
            ok_p, ok_m = cp <= t, cm <= t
            if ok_p and ok_m:
                continue
            if not (ok_p or ok_m):
                return False
            cons.append((int(i), int(j), 0 if ok_p else 1))
        return _parity_feasible(n, cons)

    lo, hi = 0, candidates.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(diag, float(candidates[lo]))


def minor(K: Kernel, S: Iterable[int]) -> float:
    """det(K_S), the probability that S is contained in the sample."""
    return determinant(principal_submatrix(K.matrix, S))


def mask_of(S: Iterable[int]) -> int:
    m = 0
    for i in S:
        m |= 1 << int(i)
    return m


def subset_of_mask(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if (mask >> i) & 1)


def subset_probability(K: Kernel, S: Iterable[int]) -> float:
    """P[Y = S] = |det(K - I_{complement of S})|."""
    S = set(int(i) for i in S)
    if any(not 0 <= i < K.N for i in S):
        raise InputError(f"index set {sorted(S)} out of range")
    shift = np.diag([0.0 if i in S else 1.0 for i in range(K.N)])
    return abs(determinant(K.matrix - shift))


def subset_probability_table(K: Kernel, signed: bool = False) -> np.ndarray:
    """P[Y = S] for every subset, indexed by bitmask.

    With ``signed=True`` the value (-1)^{N-|S|} det(K - I_{S^c}) is returned
    without the absolute value, so invalid kernels show up as negatives.
    """
    n = K.N
    total = 1 << n
    chunk = max(1, (1 << 22) // (n * n))
    idx = np.arange(n)
    out = np.empty(total)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total))
        bits = ((masks[:, None] >> idx) & 1).astype(float)
        stack = np.broadcast_to(K.matrix, (masks.size, n, n)).copy()
        stack[:, idx, idx] -= 1.0 - bits
        dets = batched_determinant(stack)
        if signed:
            out[start:start + masks.size] = dets * (-1.0) ** (n - bits.sum(axis=1))
        else:
            out[start:start + masks.size] = np.abs(dets)
    return out


def _induced_cycle_order(K: Kernel, S: Sequence[int]) -> list[int]:
    """Vertices of S in cyclic order, validating that G_K(S) is an induced cycle."""
    S = sorted(set(int(i) for i in S))
    if len(S) < 3:
        raise InputError("an induced cycle needs at least 3 vertices")
    adj = {v: [w for w in S if w != v and K.matrix[v, w] != 0] for v in S}
    if any(len(a) != 2 for a in adj.values()):
        raise InputError(f"{S} does not induce a cycle in G_K")
    order = [S[0]]
    prev, cur = None, S[0]
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == S[0]:
            break
        order.append(nxt)
        prev, cur = cur, nxt
    if len(order) != len(S):
        raise InputError(f"{S} induces a disjoint union of cycles, not one cycle")
    return order


def cycle_matchings(k: int) -> list[tuple[int, ...]]:
    """All matchings of the k-cycle whose edges are (t, t+1 mod k), t = 0..k-1.

    A matching is returned as the sorted tuple of its edge positions t.
    """
    out = []

    def grow(t, chosen):
        if t == k:
            out.append(tuple(chosen))
            return
        grow(t + 1, chosen)
        blocked = (chosen and chosen[-1] == t - 1) or (t == k - 1 and chosen and chosen[0] == 0)
        if not blocked:
            grow(t + 1, chosen + [t])

    grow(0, [])
    return out


def induced_cycle_minor_expansion(K: Kernel, S: Iterable[int]) -> float:
    """det(K_S) evaluated as a signed sum over matchings plus the full-cycle term.

    Exponential in |S| (capped at ``MATCHING_CAP``); meant as an oracle.
    """
    order = _induced_cycle_order(K, list(S))
    k = len(order)
    if k > MATCHING_CAP:
        raise CapabilityError(f"matchings expansion capped at |S|={MATCHING_CAP}")
    a = K.matrix
    edge_vals = [a[order[t], order[(t + 1) % k]] for t in range(k)]
    total = 0.0
    for match in cycle_matchings(k):
        covered = set()
        term = (-1.0) ** len(match)
        for t in match:
            term *= edge_vals[t] ** 2
            covered.update((t, (t + 1) % k))
        for t in range(k):
            if t not in covered:
                term *= a[order[t], order[t]]
        total += term
    return total + 2.0 * (-1.0) ** (k + 1) * float(np.prod(edge_vals))


def cycle_sign(K: Kernel, cycle_edges: Iterable[Sequence[int]]) -> int:
    """Product of the signs of K over the given edges."""
    s = 1
    for i, j in cycle_edges:
        v = K.matrix[i, j]
        if v == 0:
            raise InputError(f"({i}, {j}) is not an edge of G_K")
        s *= 1 if v > 0 else -1
    return s
