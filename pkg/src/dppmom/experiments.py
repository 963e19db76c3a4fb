"""Monte-Carlo recovery experiments over a grid of (N, n) cells.

Every random draw is keyed by ``SeedSequence(base_seed, spawn_key=(N, n,
trial, role))`` so the outcome of a cell never depends on which other cells
are in the grid, nor on the order in which worker processes finish.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, NumericError
from .estimator import MomentTable, estimate, success_metrics
from .graph import random_chordal_graph
from .kernel import Kernel
from .linalg import eig_sym, is_valid_kernel
from .sampler import RngSeed, sample

__all__ = [
    "TrialConfig",
    "CellResult",
    "GridResult",
    "gen_cycle_kernel",
    "gen_clique_kernel",
    "gen_chordal_kernel",
    "family_alpha",
    "run_trial",
    "run_grid",
    "parse_grid",
    "CSV_COLUMNS",
]

log = logging.getLogger(__name__)

FAMILIES = ("cycle", "clique", "chordal-random", "file")
METHODS = ("spectral", "bruteforce", "exact")
ROLE_KERNEL, ROLE_SAMPLE = 0, 1
MAX_REJECTIONS = 100
CSV_COLUMNS = ["family", "N", "n", "trials", "graph_rate", "sign_rate", "mean_rho", "seconds"]


def _signs(rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.choice(np.array([-1.0, 1.0]), size=k)


def gen_cycle_kernel(N: int, seed: RngSeed) -> Kernel:
    """K = I/2 + A/4 with independent random signs on the N-cycle edges."""
    if N < 3:
        raise InputError("cycle kernels need N >= 3")
    rng = seed.generator()
    s = _signs(rng, N)
    A = np.zeros((N, N))
    for t in range(N):
        i, j = t, (t + 1) % N
        A[i, j] = A[j, i] = s[t]
    return Kernel(0.5 * np.eye(N) + 0.25 * A, alpha=0.25)


def gen_clique_kernel(N: int, seed: RngSeed) -> Kernel:
    """K = I/2 + A/(4 sqrt N) with a full random-sign A, rejecting invalid draws."""
    if N < 3:
        raise InputError("clique kernels need N >= 3")
    scale = 1 / (4 * math.sqrt(N))
    iu = np.triu_indices(N, 1)
    for attempt in range(MAX_REJECTIONS):
        rng = (seed if attempt == 0 else seed.child(attempt)).generator()
        A = np.zeros((N, N))
        A[iu] = _signs(rng, iu[0].size)
        A = A + A.T
        M = 0.5 * np.eye(N) + scale * A
        if is_valid_kernel(M):
            if attempt:
                log.info("clique kernel N=%d: %d rejected draw(s)", N, attempt)
            return Kernel(M, alpha=scale)
    raise NumericError(f"{MAX_REJECTIONS} consecutive invalid clique draws at N={N}")


def gen_chordal_kernel(N: int, seed: RngSeed, shrink: float = 0.95) -> Kernel:
    """Random chordal graph with random signs, scaled to fit in [0, 1].

    Off-diagonal magnitude is ``shrink / (2 * spectral radius of A)`` so the
    spectrum of ``I/2 + c A`` lies strictly inside [0, 1].
    """
    rng = seed.generator()
    G = random_chordal_graph(N, rng)
    A = np.zeros((N, N))
    for (i, j), s in zip(G.edges, _signs(rng, G.m)):
        A[i, j] = A[j, i] = s
    if G.m == 0:
        return Kernel(0.5 * np.eye(N), alpha=0.25)  # separation holds vacuously
    radius = float(np.max(np.abs(eig_sym(A).values)))
    c = shrink / (2 * radius)
    return Kernel(0.5 * np.eye(N) + c * A, alpha=c)


def family_alpha(family: str, N: int) -> float | None:
    """The true separation of a generator family (None when it varies per draw)."""
    if family == "cycle":
        return 0.25
    if family == "clique":
        return 1 / (4 * math.sqrt(N))
    return None


@dataclass
class TrialConfig:
    family: str
    N_grid: Sequence[int]
    n_grid: Sequence[int]
    trials: int = 50
    alpha: float | None = None
    base_seed: int = 0
    method: str = "spectral"
    force_general: bool = False
    kernel_path: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        if self.method not in METHODS:
            raise InputError(f"unknown sampler method {self.method!r}")
        if not self.N_grid or not self.n_grid:
            raise InputError("grids must be nonempty")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if any(n < 1 for n in self.n_grid):
            raise InputError("sample sizes must be >= 1")
        if self.family == "file" and not self.kernel_path:
            raise InputError("family 'file' needs kernel_path")


@dataclass
class CellResult:
    family: str
    N: int
    n: int
    trials: int
    graph_rate: float
    sign_rate: float
    mean_rho: float
    seconds: float = 0.0
    failures: int = 0


@dataclass
class GridResult:
    config: TrialConfig
    cells: list[CellResult] = field(default_factory=list)

    def cell(self, N: int, n: int) -> CellResult:
        for c in self.cells:
            if c.N == N and c.n == n:
                return c
        raise KeyError((N, n))

    def to_csv(self, path, timing: bool = True) -> None:
        """Write one row per cell; ``timing=False`` drops the wall-clock column."""
        cols = CSV_COLUMNS if timing else CSV_COLUMNS[:-1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for c in self.cells:
                row = [c.family, c.N, c.n, c.trials, f"{c.graph_rate:.6f}",
                       f"{c.sign_rate:.6f}", f"{c.mean_rho:.10g}"]
                if timing:
                    row.append(f"{c.seconds:.3f}")
                w.writerow(row)


def _make_kernel(cfg: TrialConfig, N: int, seed: RngSeed) -> Kernel:
    if cfg.family == "cycle":
        return gen_cycle_kernel(N, seed)
    if cfg.family == "clique":
        return gen_clique_kernel(N, seed)
    if cfg.family == "chordal-random":
        return gen_chordal_kernel(N, seed)
    from .io import load_kernel_csv
    return load_kernel_csv(cfg.kernel_path)


def run_trial(cfg: TrialConfig, N: int, n: int, trial: int) -> tuple[bool, bool, float]:
    """One (kernel, samples, estimate) round; returns the success metrics."""
    key = RngSeed(cfg.base_seed, (N, n, trial))
    K = _make_kernel(cfg, N, key.child(ROLE_KERNEL))
    alpha = cfg.alpha or K.alpha or family_alpha(cfg.family, N)
    if alpha is None:
        raise InputError("alpha is required for this kernel family")
    if cfg.method == "exact":
        data = MomentTable.from_kernel(K)
    else:
        data = sample(K, n, key.child(ROLE_SAMPLE), cfg.method)
    result = estimate(data, alpha, force_general=cfg.force_general)
    return success_metrics(K, result)


def _job(args):
    cfg, N, n, trial = args
    t0 = time.perf_counter()
    try:
        out = run_trial(cfg, N, n, trial)
    except Exception as exc:  # recorded as a failed trial, the grid carries on
        log.warning("trial (N=%d, n=%d, #%d) failed: %s", N, n, trial, exc)
        out = None
    return (N, n, trial), out, time.perf_counter() - t0


def run_grid(cfg: TrialConfig) -> GridResult:
    if cfg.family == "file":
        from .io import load_kernel_csv
        N_grid = [load_kernel_csv(cfg.kernel_path).N]
    else:
        N_grid = list(cfg.N_grid)
    jobs = [(cfg, N, n, t) for N in N_grid for n in cfg.n_grid for t in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.jobs))))
    else:
        outcomes = [_job(j) for j in jobs]
    by_key = {key: (out, sec) for key, out, sec in outcomes}
    result = GridResult(cfg)
    for N in N_grid:
        for n in cfg.n_grid:
            runs = [by_key[(N, n, t)] for t in range(cfg.trials)]
            ok = [out for out, _ in runs if out is not None]
            failures = cfg.trials - len(ok)
            graph = sum(g for g, _, _ in ok) / cfg.trials
            signs = sum(s for _, s, _ in ok) / cfg.trials
            mean_rho = float(np.mean([r for _, _, r in ok])) if ok else float("nan")
            result.cells.append(CellResult(cfg.family, N, n, cfg.trials, graph, signs, mean_rho,
                                           sum(sec for _, sec in runs), failures))
    return result


def parse_grid(text: str) -> list[int]:
    """Parse ``a:b`` (inclusive), ``a:b:step``, ``a:b:log[:k]`` or ``a,b,c``.

    ``log`` places ``k`` (default 5) geometrically spaced points, rounded.
    """
    try:
        if "," in text:
            return [int(x) for x in text.split(",")]
        parts = text.split(":")
        if len(parts) == 1:
            return [int(parts[0])]
        lo, hi = int(parts[0]), int(parts[1])
        if lo > hi:
            raise InputError(f"empty range {text!r}")
        if len(parts) == 2:
            return list(range(lo, hi + 1))
        if parts[2] == "log":
            k = int(parts[3]) if len(parts) > 3 else 5
            if lo < 1 or k < 1:
                raise InputError(f"bad log grid {text!r}")
            if k == 1:
                return [lo]
            pts = np.geomspace(lo, hi, k)
            return sorted({int(round(p)) for p in pts})
        return list(range(lo, hi + 1, int(parts[2])))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"cannot parse grid {text!r}") from None


def default_jobs() -> int:
    """Worker count from ``DPPMOM_JOBS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DPPMOM_JOBS", "1")))
    except ValueError:
        return 1
