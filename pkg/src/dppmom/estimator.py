"""Method-of-moments kernel estimation with cycle-basis sign recovery.

Pipeline (general path):

1. empirical principal minors of size <= 2 give the diagonal and the squared
   off-diagonal magnitudes ``B[i, j] = K[i,i] K[j,j] - Delta{i,j}``;
2. edges are kept where ``B >= alpha^2 / 2``;
3. a shortest maximal cycle basis of the estimated graph is computed and,
   for every basis cycle, the sign statistic ``H`` is read off the empirical
   minor on its vertex set;
4. the signs of the ``H`` values form the right-hand side of a GF(2) system
   whose solution assigns a sign to every edge.

For chordal graphs the triangles ``{v, w, v*}`` along a perfect elimination
ordering determine the signs edge by edge without a linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cyclebasis import Cycle, CycleBasis, shortest_maximal_cycle_basis
from .errors import InputError
from .gf2 import Gf2Matrix, Gf2Vector, solve
from .graph import UGraph, lex_bfs_peo, peo_spanning_forest
from .kernel import RHO_ENUM_CAP, Kernel, SignAssignment, induced_graph, minor, rho, rho_parity
from .linalg import determinant
from .sampler import SampleSet

__all__ = [
    "MomentTable",
    "EstimateResult",
    "empirical_minors",
    "recover_graph",
    "compute_h",
    "recover_signs",
    "estimate",
    "estimate_chordal",
    "success_metrics",
    "bhat_histogram",
    "H_TIE_TOL",
]

log = logging.getLogger(__name__)

H_TIE_TOL = 1e-12
SOLVED = "solved"
FALLBACK = "fallback_all_ones"


def _key(S: Iterable[int]) -> frozenset:
    return frozenset(int(i) for i in S)


class MomentTable:
    """Principal-minor estimates, keyed by ``frozenset`` of vertices.

    Entries missing from ``delta`` are filled on demand through ``compute``,
    which maps a list of subsets to their values.  ``n`` is the sample count
    (``None`` for oracle or synthetic tables).
    """

    def __init__(self, N: int, compute: Callable[[list[frozenset]], list[float]],
                 n: int | None = None, delta: dict | None = None):
        self.N = N
        self.n = n
        self._compute = compute
        self.delta: dict[frozenset, float] = {frozenset(): 1.0}
        if delta:
            self.delta.update(delta)
        self._pairs: np.ndarray | None = None

    def ensure(self, subsets: Iterable[Iterable[int]]) -> None:
        keys = {_key(S) for S in subsets}
        missing = [S for S in keys if S not in self.delta]
        for S in missing:
            if any(not 0 <= i < self.N for i in S):
                raise InputError(f"subset {sorted(S)} outside ground set of size {self.N}")
        if missing:
            self.delta.update(zip(missing, self._compute(missing)))

    def __getitem__(self, S: Iterable[int]) -> float:
        key = _key(S)
        if key not in self.delta:
            self.ensure([key])
        return self.delta[key]

    def __contains__(self, S) -> bool:
        return _key(S) in self.delta

    def pair_matrix(self) -> np.ndarray:
        """Matrix with Delta{i} on the diagonal and Delta{i,j} off it."""
        if self._pairs is None:
            N = self.N
            subsets = [(i,) for i in range(N)] + [(i, j) for i in range(N) for j in range(i + 1, N)]
            self.ensure(subsets)
            P = np.empty((N, N))
            for i in range(N):
                P[i, i] = self.delta[frozenset((i,))]
                for j in range(i + 1, N):
                    P[i, j] = P[j, i] = self.delta[frozenset((i, j))]
            self._pairs = P
        return self._pairs

    @classmethod
    def from_samples(cls, samples: SampleSet) -> "MomentTable":
        """Empirical containment frequencies; all pairs come from one Gram product."""
        if samples.n < 1:
            raise InputError("at least one sample is required")
        ind = samples.indicators
        n = samples.n

        def compute(subsets):
            return [float(np.count_nonzero(ind[:, sorted(S)].all(axis=1))) / n for S in subsets]

        table = cls(samples.N, compute, n=n)
        X = ind.astype(np.float64)
        counts = X.T @ X
        table._pairs = counts / n
        for i in range(samples.N):
            table.delta[frozenset((i,))] = counts[i, i] / n
            for j in range(i + 1, samples.N):
                table.delta[frozenset((i, j))] = counts[i, j] / n
        return table

    @classmethod
    def from_kernel(cls, K: Kernel) -> "MomentTable":
        """Exact minors det(K_S): the zero-noise oracle."""
        return cls(K.N, lambda subsets: [minor(K, S) for S in subsets])

    @classmethod
    def from_function(cls, N: int, fn: Callable[[frozenset], float]) -> "MomentTable":
        return cls(N, lambda subsets: [float(fn(S)) for S in subsets])


def empirical_minors(samples: SampleSet, subsets: Iterable[Iterable[int]]) -> MomentTable:
    table = MomentTable.from_samples(samples)
    table.ensure(subsets)
    return table


def recover_graph(moments: MomentTable, alpha: float) -> tuple[UGraph, np.ndarray, np.ndarray]:
    """Estimated graph, raw ``B`` matrix (zero diagonal) and estimated diagonal.

    The edge test compares the raw, unclamped ``B`` with ``alpha^2 / 2``.
    """
    P = moments.pair_matrix()
    kdiag = np.diag(P).copy()
    B = np.outer(kdiag, kdiag) - P
    np.fill_diagonal(B, 0.0)
    iu, ju = np.triu_indices(moments.N, 1)
    keep = B[iu, ju] >= alpha ** 2 / 2
    graph = UGraph(moments.N, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
    return graph, B, kdiag


def _magnitude(bhat: np.ndarray, i: int, j: int) -> float:
    return float(np.sqrt(min(max(bhat[i, j], 0.0), 1.0)))


def compute_h(moments: MomentTable, khat_diag: np.ndarray, bhat: np.ndarray,
              cycle: Cycle) -> float:
    """Sign statistic of one cycle: Delta_S - det(K~_S) + 2 (-1)^{|S|+1} prod sqrt(B).

    ``K~_S`` has the estimated diagonal and ``sqrt(B)`` on the cycle edges.
    """
    S = sorted(cycle.vertex_set)
    pos = {v: k for k, v in enumerate(S)}
    Kt = np.diag(khat_diag[S])
    prod = 1.0
    for i, j in cycle.edges():
        b = _magnitude(bhat, i, j)
        Kt[pos[i], pos[j]] = Kt[pos[j], pos[i]] = b
        prod *= b
    k = len(S)
    return moments[S] - determinant(Kt) + 2.0 * (-1.0) ** (k + 1) * prod


def recover_signs(ghat: UGraph, basis: CycleBasis, hhat: Sequence[float]
                  ) -> tuple[SignAssignment, str, list[str]]:
    """Solve the GF(2) sign system; returns (signs, status, warnings).

    Edges in no basis cycle (bridges) are set positive; inconsistency falls
    back to all-positive signs.
    """
    warnings = []
    A = Gf2Matrix.from_vectors([c.incidence for c in basis.cycles], ghat.m)
    bits = 0
    for i, h in enumerate(hhat):
        if abs(h) < H_TIE_TOL:
            warnings.append(f"H for basis cycle {i} is {h:.3g}; treated as positive")
        if h > 0 or abs(h) < H_TIE_TOL:
            bits |= 1 << i
    x = solve(A, Gf2Vector(len(basis.cycles), bits))
    if x is None:
        warnings.append("sign system inconsistent; all signs set positive")
        return SignAssignment(ghat, (1,) * ghat.m), FALLBACK, warnings
    xs = x.to_list()
    for e in range(ghat.m):
        if A.column_is_zero(e):
            xs[e] = 1
    return SignAssignment(ghat, tuple(2 * v - 1 for v in xs)), SOLVED, warnings


@dataclass
class EstimateResult:
    khat: Kernel
    ghat: UGraph
    basis: CycleBasis
    hhat: list[float]
    signs: SignAssignment
    sign_system_status: str
    path: str
    bhat: np.ndarray = field(repr=False)
    warnings: list[str] = field(default_factory=list)

    @property
    def sparsity_estimate(self) -> int:
        return self.basis.sparsity


def _assemble(kdiag: np.ndarray, bhat: np.ndarray, signs: SignAssignment) -> Kernel:
    M = np.diag(kdiag)
    for (i, j), s in zip(signs.graph.edges, signs.signs):
        M[i, j] = M[j, i] = s * _magnitude(bhat, i, j)
    return Kernel.unchecked(M)


def _as_moments(data: SampleSet | MomentTable) -> MomentTable:
    if isinstance(data, MomentTable):
        return data
    if isinstance(data, SampleSet):
        return MomentTable.from_samples(data)
    raise InputError("expected a SampleSet or a MomentTable")


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")


def _general(moments: MomentTable, ghat, bhat, kdiag) -> EstimateResult:
    basis = shortest_maximal_cycle_basis(ghat)
    moments.ensure(c.vertex_set for c in basis.cycles)
    hhat = [compute_h(moments, kdiag, bhat, c) for c in basis.cycles]
    signs, status, warnings = recover_signs(ghat, basis, hhat)
    if basis.chorded:
        warnings.append("cycle basis contains a chorded cycle")
    return EstimateResult(_assemble(kdiag, bhat, signs), ghat, basis, hhat, signs,
                          status, "general", bhat, warnings)


def _chordal(moments: MomentTable, ghat, bhat, kdiag, peo) -> EstimateResult:
    forest = peo_spanning_forest(ghat, peo)
    pos, star = peo.position, peo.star
    sign = {e: 1 for e in forest.edges}
    pending = [e for e in ghat.edges if e not in sign]
    # the triangle for {v, w} (v earlier) uses {v, v*} and {v*, w}; the latter
    # has a later first endpoint, so visiting in decreasing first-endpoint
    # position resolves every dependency before it is needed
    oriented = []
    for i, j in pending:
        v, w = (i, j) if pos[i] < pos[j] else (j, i)
        oriented.append((v, w))
    oriented.sort(key=lambda e: (-pos[e[0]], -pos[e[1]]))
    triangles, hhat = [], []
    moments.ensure({v, w, star[v]} for v, w in oriented)
    for v, w in oriented:
        t = star[v]
        tri = Cycle.from_vertices(ghat, (v, w, t))
        h = compute_h(moments, kdiag, bhat, tri)
        e1, e2 = tuple(sorted((v, t))), tuple(sorted((w, t)))
        sign[(min(v, w), max(v, w))] = (1 if h > 0 or abs(h) < H_TIE_TOL else -1) * sign[e1] * sign[e2]
        triangles.append(tri)
        hhat.append(h)
    warnings = [f"H for triangle {tri.vertices} is {h:.3g}; treated as positive"
                for tri, h in zip(triangles, hhat) if abs(h) < H_TIE_TOL]
    signs = SignAssignment(ghat, tuple(sign[e] for e in ghat.edges))
    basis = CycleBasis(tuple(triangles), len(triangles))
    return EstimateResult(_assemble(kdiag, bhat, signs), ghat, basis, hhat, signs,
                          SOLVED, "chordal", bhat, warnings)


def estimate(data: SampleSet | MomentTable, alpha: float,
             force_general: bool = False) -> EstimateResult:
    """Estimate the kernel from samples (or a table of minors).

    Dispatches to the chordal path when the estimated graph is chordal,
    unless ``force_general`` is set.
    """
    _check_alpha(alpha)
    moments = _as_moments(data)
    ghat, bhat, kdiag = recover_graph(moments, alpha)
    if not force_general:
        peo = lex_bfs_peo(ghat)
        if peo is not None:
            return _chordal(moments, ghat, bhat, kdiag, peo)
    return _general(moments, ghat, bhat, kdiag)


def estimate_chordal(data: SampleSet | MomentTable, alpha: float) -> EstimateResult:
    """Chordal path; falls back to the general path if the graph is not chordal."""
    _check_alpha(alpha)
    moments = _as_moments(data)
    ghat, bhat, kdiag = recover_graph(moments, alpha)
    peo = lex_bfs_peo(ghat)
    if peo is None:
        log.info("estimated graph is not chordal; using the general path")
        return _general(moments, ghat, bhat, kdiag)
    return _chordal(moments, ghat, bhat, kdiag, peo)


def success_metrics(K: Kernel, result: EstimateResult) -> tuple[bool, bool, float]:
    """(graph recovered, graph and signs recovered up to flips, rho(K^, K))."""
    truth = induced_graph(K)
    graph_ok = truth.edge_set() == result.ghat.edge_set()
    signs_ok = graph_ok and SignAssignment.from_kernel(K, truth).agrees_up_to_flips(result.signs)
    dist = rho(result.khat, K) if K.N <= RHO_ENUM_CAP else rho_parity(result.khat, K)
    return graph_ok, signs_ok, dist


def bhat_histogram(bhat: np.ndarray, bins: int = 20) -> dict:
    """Histogram of the off-diagonal B values, a diagnostic for picking alpha."""
    iu = np.triu_indices(bhat.shape[0], 1)
    values = bhat[iu]
    if values.size == 0:
        return {"counts": [], "edges": []}
    counts, edges = np.histogram(values, bins=bins)
    return {"counts": counts.tolist(), "edges": edges.tolist()}
