"""Adversarial perturbations of principal minors for the stability tests."""

import itertools

import numpy as np

from dppmom.estimator import MomentTable, estimate
from dppmom.kernel import minor


def cycle_matrix(k, alpha, rng):
    M = 0.5 * np.eye(k)
    for t in range(k):
        M[t, (t + 1) % k] = M[(t + 1) % k, t] = alpha * rng.choice([-1.0, 1.0])
    return M


def perturbed_estimate(K, alpha, eps, signs):
    """Estimate from det(K_S) + eps*s_S (|S| <= 2) or (alpha/4)^|S| s_S (|S| >= 3)."""
    def delta(S):
        if not S:
            return 1.0
        budget = eps if len(S) <= 2 else (alpha / 4) ** len(S)
        return minor(K, S) + budget * signs(S)
    return estimate(MomentTable.from_function(K.N, delta), alpha)


def gradient_adversary(K, alpha, eps):
    """Signs pushing the basis-cycle statistic toward zero, one corner per small minor."""
    k = K.N
    small = [frozenset(S) for r in (1, 2) for S in itertools.combinations(range(k), r)]

    def h(vec, big):
        d = dict(zip(small, vec))
        res = perturbed_estimate(K, alpha, eps, lambda S: d.get(frozenset(S), big))
        return res.hhat[0]

    h0 = h(np.zeros(len(small)), 0.0)
    grad = np.array([h(np.eye(len(small))[i] * 1e-3, 0.0) - h0 for i in range(len(small))])
    vec = -np.sign(grad) * np.sign(h0)
    vec[vec == 0] = 1.0
    d = dict(zip(small, vec))
    big = -np.sign(h0)
    return lambda S: d.get(frozenset(S), big)
