import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from dppmom.bounds import (ComplexityQuery, divergence_exhaustive, estimation_bound_raw,
                           fano_family, gershgorin_discs, lower_bound_kernels,
                           minimax_lower_bound_raw, recovery_bound_raw,
                           sample_bound_estimation, sample_bound_recovery)
from dppmom.errors import InputError
from dppmom.graph import complete_graph
from dppmom.kernel import Kernel, induced_graph, minor
from oracles import cofactor_det


def test_recovery_bound_oracle_value():
    # ln(5^4 / 0.1) = ln 6250 = 8.74034..., (0.5/4)^6 = 1/262144 exactly
    raw = math.log(6250) * 262144
    assert raw == pytest.approx(2291226.835, abs=1e-3)
    q = ComplexityQuery(5, 3, 0.5, delta=0.1)
    assert recovery_bound_raw(q) == pytest.approx(raw, rel=1e-14)
    assert sample_bound_recovery(q) == 2291227


def test_recovery_bound_specializations():
    q = ComplexityQuery(1, 3, 0.5, delta=0.2)
    assert recovery_bound_raw(q) == pytest.approx(math.log(5) * 4 ** 6 / 0.5 ** 6)
    a = recovery_bound_raw(ComplexityQuery(7, 3, 0.25))
    b = recovery_bound_raw(ComplexityQuery(7, 3, 0.5))
    assert a / b == pytest.approx(64)


def test_estimation_bound_examples():
    q = ComplexityQuery(10, 3, 0.5, eps=0.1)
    first = Fraction(1) / (Fraction(1, 2) ** 2 * Fraction(1, 10) ** 2)
    second = 3 * Fraction(8) ** 6
    assert first == 400 and first + second == 786832
    assert estimation_bound_raw(q) == pytest.approx(786832 * math.log(10), rel=1e-14)
    assert sample_bound_estimation(q) == 1811748
    # halving eps multiplies the 1/(alpha eps)^2 term by 4
    h = ComplexityQuery(10, 3, 0.5, eps=0.05)
    assert estimation_bound_raw(h) - estimation_bound_raw(q) == pytest.approx(3 * 400 * math.log(10))
    f = ComplexityQuery(9, 2, 0.5, eps=0.2)
    assert sample_bound_estimation(f) == math.ceil((1 / (0.25 * 0.04) + 2 * 8 ** 4) * math.log(9))


def test_minimax_lower_bound_formula():
    q = ComplexityQuery(12, 3, 0.1, eps=0.1)
    want = 8 ** 3 / 0.1 ** 6 + math.log(4) / 0.6 ** 3 + math.log(12) / 0.01
    assert minimax_lower_bound_raw(q) == pytest.approx(want)


def test_query_validation():
    for bad in [dict(N=0, ell=3, alpha=.5), dict(N=5, ell=1, alpha=.5),
                dict(N=5, ell=3, alpha=1.5), dict(N=5, ell=3, alpha=.5, delta=1.0),
                dict(N=5, ell=3, alpha=.5, eps=0)]:
        with pytest.raises(InputError):
            ComplexityQuery(**bad)


def test_lower_bound_pair():
    pair = lower_bound_kernels(3, 1 / 8)
    for K in (pair.kplus, pair.kminus):
        assert induced_graph(K).edge_set() == complete_graph(3).edge_set()
    # flipping the closing edge flips the full-cycle term 2 prod(K_e), so the
    # minors differ by 4 alpha^ell (cofactor oracle: a^3 + 2 b^2 (+-b) - 3 a b^2)
    full = cofactor_det(pair.kplus.matrix) - cofactor_det(pair.kminus.matrix)
    assert full == pytest.approx(4 * (1 / 8) ** 3, abs=1e-15) == 0.0078125
    for r in (1, 2):
        for J in itertools.combinations(range(3), r):
            assert minor(pair.kplus, J) == pytest.approx(minor(pair.kminus, J), abs=1e-15)
    with pytest.raises(InputError):
        lower_bound_kernels(3, 0.2)
    with pytest.raises(InputError):
        lower_bound_kernels(2, 0.1)


@pytest.mark.parametrize("ell", [3, 4, 5, 6])
def test_lower_bound_pair_probability_gap(ell):
    from dppmom.kernel import subset_probability_table
    pair = lower_bound_kernels(ell, 1 / 8)
    gap = subset_probability_table(pair.kplus) - subset_probability_table(pair.kminus)
    assert np.allclose(np.abs(gap), 4 * (1 / 8) ** ell, atol=1e-14, rtol=0)


@pytest.mark.parametrize("ell", [3, 4, 5, 6])
@pytest.mark.parametrize("alpha", [1 / 16, 1 / 8])
def test_lower_bound_divergences(ell, alpha):
    pair = lower_bound_kernels(ell, alpha)
    kl, hel = divergence_exhaustive(pair.kplus, pair.kminus)
    assert 0 < kl <= 4 * (6 * alpha) ** ell
    assert 0 < hel <= (8 * alpha ** 2) ** ell


def test_divergence_identity_and_additivity():
    pair = lower_bound_kernels(3, 1 / 8)
    assert divergence_exhaustive(pair.kplus, pair.kplus) == (0.0, 0.0)
    kl1, _ = divergence_exhaustive(pair.kplus, pair.kminus)
    Z = np.zeros((3, 3))
    big_p = Kernel(np.block([[pair.kplus.matrix, Z], [Z, pair.kplus.matrix]]))
    big_m = Kernel(np.block([[pair.kminus.matrix, Z], [Z, pair.kminus.matrix]]))
    kl2, _ = divergence_exhaustive(big_p, big_m)
    assert kl2 == pytest.approx(2 * kl1, rel=1e-9)


def test_divergence_support_violation_names_subset():
    with pytest.raises(InputError, match=r"\[1\]"):
        divergence_exhaustive(Kernel(np.diag([0.5])), Kernel(np.diag([0.0])))
    with pytest.raises(InputError):
        divergence_exhaustive(Kernel(np.diag([0.5])), Kernel(np.diag([0.5, 0.5])))


def test_fano_family():
    fam = fano_family(6, 3, 1 / 8)
    assert len(fam) == 3 and all(K.N == 6 for K in fam)
    for K in fam[1:]:
        kl, _ = divergence_exhaustive(K, fam[0])
        assert kl <= 4 * (6 / 8) ** 3
        assert np.array_equal(np.diag(K.matrix), np.diag(fam[0].matrix))
    padded = fano_family(7, 3, 1 / 8)
    assert len(padded) == 3 and padded[0].matrix[6, 6] == 0


def test_gershgorin():
    discs = gershgorin_discs(np.array([[.5, .25, -.25], [.25, .5, 0], [-.25, 0, .5]]))
    assert discs == [(.5, .5), (.5, .25), (.5, .25)]
