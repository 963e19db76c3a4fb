"""Sample-complexity calculators and the two-point lower-bound construction.

All logarithms are natural.  Each calculator has a ``*_raw`` twin returning
the unrounded real value (for plotting); the public versions return the
ceiling as an integer sample count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .kernel import Kernel, mask_of, subset_of_mask, subset_probability_table

__all__ = [
    "ComplexityQuery",
    "LowerBoundKernelPair",
    "recovery_bound_raw",
    "sample_bound_recovery",
    "estimation_bound_raw",
    "sample_bound_estimation",
    "minimax_lower_bound_raw",
    "lower_bound_kernels",
    "divergence_exhaustive",
    "fano_family",
    "gershgorin_discs",
    "DIVERGENCE_CAP",
]

DIVERGENCE_CAP = 16


@dataclass(frozen=True)
class ComplexityQuery:
    N: int
    ell: int
    alpha: float
    eps: float = 0.1
    delta: float = 0.1
    C: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise InputError("N must be >= 1")
        if self.ell < 2:
            raise InputError("ell must be >= 2")
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie in (0, 1)")
        if self.eps <= 0:
            raise InputError("eps must be positive")
        if not 0 < self.delta < 1:
            raise InputError("delta must lie in (0, 1)")
        if self.C <= 0:
            raise InputError("C must be positive")


def recovery_bound_raw(q: ComplexityQuery) -> float:
    """log(N^(ell+1) / delta) / (alpha/4)^(2 ell): samples for sign recovery."""
    return ((q.ell + 1) * math.log(q.N) - math.log(q.delta)) / (q.alpha / 4) ** (2 * q.ell)


def sample_bound_recovery(q: ComplexityQuery) -> int:
    return math.ceil(recovery_bound_raw(q))


def estimation_bound_raw(q: ComplexityQuery) -> float:
    """C (1/(alpha^2 eps^2) + ell (4/alpha)^(2 ell)) log N."""
    return q.C * (1 / (q.alpha ** 2 * q.eps ** 2)
                  + q.ell * (4 / q.alpha) ** (2 * q.ell)) * math.log(q.N)


def sample_bound_estimation(q: ComplexityQuery) -> int:
    return math.ceil(estimation_bound_raw(q))


def minimax_lower_bound_raw(q: ComplexityQuery) -> float:
    """C (8^ell / alpha^(2 ell) + log(N/ell) / (6 alpha)^ell + log N / eps^2).

    Formula evaluation only; nothing here checks it empirically.
    """
    return q.C * (8 ** q.ell / q.alpha ** (2 * q.ell)
                  + math.log(q.N / q.ell) / (6 * q.alpha) ** q.ell
                  + math.log(q.N) / q.eps ** 2)


@dataclass(frozen=True)
class LowerBoundKernelPair:
    kplus: Kernel
    kminus: Kernel


def _cycle_block(ell: int, alpha: float, closing: float) -> np.ndarray:
    M = 0.5 * np.eye(ell)
    for i in range(ell - 1):
        M[i, i + 1] = M[i + 1, i] = alpha
    M[0, ell - 1] = M[ell - 1, 0] = closing
    return M


def lower_bound_kernels(ell: int, alpha: float) -> LowerBoundKernelPair:
    """The two ell-cycle kernels that differ only in the sign of the closing edge."""
    if ell < 3:
        raise InputError("ell must be >= 3")
    if not 0 < alpha <= 1 / 8:
        raise InputError("the construction needs 0 < alpha <= 1/8")
    return LowerBoundKernelPair(Kernel(_cycle_block(ell, alpha, alpha), alpha),
                                Kernel(_cycle_block(ell, alpha, -alpha), alpha))


def divergence_exhaustive(K1: Kernel, K2: Kernel) -> tuple[float, float]:
    """(KL(DPP(K1) || DPP(K2)), sum_S (sqrt p1 - sqrt p2)^2) over all 2^N subsets.

    The second value is the squared Hellinger distance without the 1/2 factor.
    """
    if K1.N != K2.N:
        raise InputError("kernels have different dimensions")
    if K1.N > DIVERGENCE_CAP:
        raise InputError(f"exhaustive divergence capped at N={DIVERGENCE_CAP}")
    p = subset_probability_table(K1)
    q = subset_probability_table(K2)
    support = p > 0
    bad = np.flatnonzero(support & (q <= 0))
    if bad.size:
        S = [i + 1 for i in subset_of_mask(int(bad[0]), K1.N)]
        raise InputError(f"KL undefined: subset {S} has P1 > 0 but P2 = 0")
    kl = float(np.sum(p[support] * np.log(p[support] / q[support])))
    hel = float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))
    return kl, hel


def fano_family(N: int, ell: int, alpha: float) -> list[Kernel]:
    """K0 (all blocks K+) followed by Kj (block j replaced by K-), j = 1..N//ell.

    Coordinates beyond the last full block are padded with zeros.
    """
    if ell > N:
        raise InputError("need ell <= N")
    pair = lower_bound_kernels(ell, alpha)
    L = N // ell

    def build(minus_block: int | None) -> Kernel:
        M = np.zeros((N, N))
        for b in range(L):
            blk = pair.kminus if b == minus_block else pair.kplus
            M[b * ell:(b + 1) * ell, b * ell:(b + 1) * ell] = blk.matrix
        return Kernel(M, alpha)

    return [build(None)] + [build(j) for j in range(L)]


def gershgorin_discs(A: np.ndarray) -> list[tuple[float, float]]:
    """(center, radius) of each row's Gershgorin disc."""
    A = np.asarray(A, dtype=float)
    radii = np.abs(A).sum(axis=1) - np.abs(np.diag(A))
    return list(zip(np.diag(A).tolist(), radii.tolist()))
