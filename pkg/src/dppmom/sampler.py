"""Exact DPP samplers.

Two routes: :func:`sample_bruteforce` tabulates all 2^N subset probabilities
and inverts the CDF; :func:`sample_spectral` is the eigendecomposition sampler
(select eigenvectors by independent coin flips, then draw items one by one
from the resulting projection DPP).  The spectral sampler runs a whole batch
of draws in lockstep on a ``(batch, N, N)`` array.

Random streams are numpy ``PCG64`` generators seeded through
``SeedSequence(seed, spawn_key=stream)``, so a ``(seed, stream)`` pair always
produces the same draws on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapabilityError, InputError, NumericError
from .kernel import Kernel, subset_probability_table
from .linalg import eig_sym

__all__ = [
    "RngSeed",
    "SampleSet",
    "sample_bruteforce",
    "sample_spectral",
    "sample",
    "BRUTEFORCE_CAP",
]

BRUTEFORCE_CAP = 20
CLAMP_TOL = 1e-9
EXHAUSTED = 1e-12


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        stream = self.stream
        if isinstance(stream, int):
            stream = (stream,)
        object.__setattr__(self, "stream", tuple(int(s) for s in stream))
        if self.seed < 0 or any(s < 0 for s in self.stream):
            raise InputError("seed and stream ids must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *keys: int) -> "RngSeed":
        return RngSeed(self.seed, self.stream + tuple(keys))


def _as_seed(seed) -> RngSeed:
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` subsets of a ground set of size ``N``, as an ``(n, N)`` bool array."""

    N: int
    indicators: np.ndarray = field(repr=False)

    def __post_init__(self):
        ind = np.asarray(self.indicators, dtype=bool)
        if ind.ndim != 2 or ind.shape[1] != self.N:
            raise InputError(f"indicator array must have shape (n, {self.N})")
        object.__setattr__(self, "indicators", ind)

    @property
    def n(self) -> int:
        return self.indicators.shape[0]

    def __len__(self):
        return self.n

    @classmethod
    def from_subsets(cls, N: int, subsets: Iterable[Iterable[int]]) -> "SampleSet":
        rows = []
        for S in subsets:
            row = np.zeros(N, dtype=bool)
            for i in S:
                if not 0 <= int(i) < N:
                    raise InputError(f"index {i} outside ground set of size {N}")
                row[int(i)] = True
            rows.append(row)
        return cls(N, np.array(rows, dtype=bool).reshape(len(rows), N))

    @classmethod
    def from_masks(cls, N: int, masks: np.ndarray) -> "SampleSet":
        masks = np.asarray(masks, dtype=np.int64)
        return cls(N, ((masks[:, None] >> np.arange(N)) & 1).astype(bool))

    @property
    def subsets(self) -> list[frozenset]:
        return [frozenset(np.flatnonzero(row).tolist()) for row in self.indicators]

    def masks(self) -> np.ndarray:
        if self.N > 62:
            raise CapabilityError("bitmask view needs N <= 62")
        return self.indicators.astype(np.int64) @ (np.int64(1) << np.arange(self.N, dtype=np.int64))

    def __eq__(self, other):
        return (isinstance(other, SampleSet) and self.N == other.N
                and np.array_equal(self.indicators, other.indicators))


def sample_bruteforce(K: Kernel, n: int, seed) -> SampleSet:
    """Inverse-CDF draws from the full table of P[Y = S]."""
    if K.N > BRUTEFORCE_CAP:
        raise CapabilityError(f"brute-force sampler capped at N={BRUTEFORCE_CAP}")
    if n < 0:
        raise InputError("sample count must be non-negative")
    p = subset_probability_table(K, signed=True)
    if p.min() < -1e-10:
        raise NumericError(f"negative subset probability {p.min():.3g}: kernel is invalid")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise NumericError(f"subset probabilities sum to {total!r}")
    cdf = np.cumsum(p / total)
    cdf[-1] = 1.0
    u = _as_seed(seed).generator().random(n)
    masks = np.searchsorted(cdf, u, side="right")
    return SampleSet.from_masks(K.N, masks)


def _projection_draws(W: np.ndarray, k: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sequential draws from a batch of projection DPPs.

    ``W[b]`` holds one row per item (coordinates in the selected eigenbasis of
    draw ``b``) and ``k[b]`` is that draw's cardinality.  After each pick the
    rows are projected off the picked row, which is Gram-Schmidt on the
    selected eigenvectors; squared row norms are the next-step weights.
    """
    B, N, _ = W.shape
    chosen = np.zeros((B, N), dtype=bool)
    alive = k > 0
    rows = np.arange(B)
    for step in range(int(k.max(initial=0))):
        alive &= step < k
        if not alive.any():
            break
        u = rng.random(B)
        w = np.einsum("bij,bij->bi", W, W)
        w[chosen] = 0.0
        np.clip(w, 0.0, None, out=w)
        tot = w.sum(axis=1)
        alive &= tot > EXHAUSTED
        cdf = np.cumsum(w, axis=1)
        pick = (cdf <= (u * tot)[:, None]).sum(axis=1)
        pick = np.minimum(pick, N - 1)
        idx = rows[alive]
        pick = pick[alive]
        chosen[idx, pick] = True
        q = W[idx, pick, :]
        norm = np.linalg.norm(q, axis=1)
        ok = norm > EXHAUSTED
        q[ok] /= norm[ok, None]
        q[~ok] = 0.0
        Wa = W[idx]
        Wa -= np.einsum("bij,bj->bi", Wa, q)[:, :, None] * q[:, None, :]
        W[idx] = Wa
    return chosen


def sample_spectral(K: Kernel, n: int, seed, batch: int | None = None) -> SampleSet:
    """Spectral sampler: one eigendecomposition, then vectorized batches."""
    if n < 0:
        raise InputError("sample count must be non-negative")
    dec = eig_sym(K.matrix)
    lam = dec.values
    if lam.min() < -CLAMP_TOL or lam.max() > 1 + CLAMP_TOL:
        raise NumericError("kernel eigenvalues fall outside [0, 1]")
    lam = np.clip(lam, 0.0, 1.0)
    V = dec.vectors
    N = K.N
    batch = batch or max(1, (1 << 20) // (N * N))
    rng = _as_seed(seed).generator()
    out = np.zeros((n, N), dtype=bool)
    for start in range(0, n, batch):
        b = min(batch, n - start)
        select = rng.random((b, N)) < lam
        W = V[None, :, :] * select[:, None, :]
        out[start:start + b] = _projection_draws(W, select.sum(axis=1), rng)
    return SampleSet(N, out)


def sample(K: Kernel, n: int, seed, method: str = "spectral") -> SampleSet:
    if method == "spectral":
        return sample_spectral(K, n, seed)
    if method == "bruteforce":
        return sample_bruteforce(K, n, seed)
    raise InputError(f"unknown sampling method {method!r}")
