import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dppmom.cyclebasis import Cycle, CycleBasis
from dppmom.errors import InputError
from dppmom.estimator import (FALLBACK, SOLVED, MomentTable, bhat_histogram, compute_h,
                              empirical_minors, estimate, estimate_chordal, recover_graph,
                              recover_signs, success_metrics)
from dppmom.experiments import gen_chordal_kernel, gen_clique_kernel, gen_cycle_kernel
from dppmom.graph import UGraph, complete_graph, cycle_graph
from dppmom.kernel import Kernel, SignAssignment, dn_conjugate, minor, rho
from dppmom.sampler import RngSeed, SampleSet, sample

THREE = SampleSet.from_subsets(2, [[0], [0, 1], []])


def cycle_kernel(signs, mag=0.25):
    N = len(signs)
    M = 0.5 * np.eye(N)
    for t, s in enumerate(signs):
        i, j = t, (t + 1) % N
        M[i, j] = M[j, i] = s * mag
    return Kernel(M)


def pairs_table(d1, d2, d12):
    vals = {frozenset({0}): d1, frozenset({1}): d2, frozenset({0, 1}): d12}
    return MomentTable.from_function(2, lambda S: vals[S])


def test_empirical_minor_examples():
    m = empirical_minors(THREE, [[0], [0, 1]])
    assert m[[0]] == pytest.approx(2 / 3)
    assert m[[0, 1]] == pytest.approx(1 / 3)
    assert m[[]] == 1.0
    assert m[[1]] == pytest.approx(1 / 3)


def test_moment_table_lazy_subsets_match_counting(rng):
    X = rng.random((500, 6)) < 0.4
    m = MomentTable.from_samples(SampleSet(6, X))
    for S in ([0, 2, 5], [1, 3], [4]):
        assert m[S] == pytest.approx(X[:, S].all(axis=1).mean())
    with pytest.raises(InputError):
        m.ensure([[6]])


def test_recover_graph_threshold_examples():
    G, B, _ = recover_graph(pairs_table(0.6, 0.6, 0.06), 0.5)
    assert B[0, 1] == pytest.approx(0.3) and G.edges == ((0, 1),)
    G, B, kd = recover_graph(MomentTable.from_samples(THREE), 0.5)
    assert np.allclose(kd, [2 / 3, 1 / 3])
    assert B[0, 1] == pytest.approx(-1 / 9)
    assert G.m == 0


def test_recover_graph_exact_cycle():
    K = gen_cycle_kernel(5, RngSeed(0))
    G, _, _ = recover_graph(MomentTable.from_kernel(K), 0.25)
    assert G.edge_set() == cycle_graph(5).edge_set()


def _h_for(signs):
    K = cycle_kernel(signs)
    m = MomentTable.from_kernel(K)
    G, B, kd = recover_graph(m, 0.25)
    c = Cycle.from_vertices(G, range(len(signs)))
    return compute_h(m, kd, B, c)


def test_compute_h_examples():
    assert _h_for([1, 1, 1]) == pytest.approx(0.03125, abs=1e-12)
    assert _h_for([1, 1, -1]) == pytest.approx(-0.03125, abs=1e-12)
    assert _h_for([1, 1, 1, 1]) == pytest.approx(-0.0078125, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_h_sign_encodes_cycle_sign(k, seed):
    """sgn H = +1 exactly when the number of positive cycle edges is odd."""
    signs = np.random.default_rng(seed).choice([-1, 1], k)
    h = _h_for(signs)
    assert abs(h) == pytest.approx(2 * 0.25 ** k, rel=1e-9)
    assert (h > 0) == (np.sum(signs > 0) % 2 == 1)


def test_recover_signs_triangle():
    G = complete_graph(3)
    basis = CycleBasis((Cycle.from_vertices(G, [0, 1, 2]),), 1)
    signs, status, warns = recover_signs(G, basis, [0.03])
    assert status == SOLVED and not warns
    assert signs.signs == (1, -1, -1)
    assert signs.agrees_up_to_flips(SignAssignment(G, (1, 1, 1)))


def test_recover_signs_forest_all_positive():
    G = UGraph.from_edges(4, [(0, 1), (1, 2), (1, 3)])
    signs, status, _ = recover_signs(G, CycleBasis((), 0), [])
    assert signs.signs == (1, 1, 1) and status == SOLVED


def test_recover_signs_inconsistent_falls_back():
    G = complete_graph(3)
    c = Cycle.from_vertices(G, [0, 1, 2])
    signs, status, warns = recover_signs(G, CycleBasis((c, c), 2), [0.1, -0.1])
    assert status == FALLBACK
    assert signs.signs == (1, 1, 1)
    assert warns


def test_tie_is_positive_with_warning():
    G = complete_graph(3)
    c = Cycle.from_vertices(G, [0, 1, 2])
    signs, _, warns = recover_signs(G, CycleBasis((c,), 1), [0.0])
    assert signs.signs == (1, -1, -1) and warns


def random_family_kernel(family, N, seed):
    gen = {"cycle": gen_cycle_kernel, "clique": gen_clique_kernel,
           "chordal": gen_chordal_kernel}[family]
    return gen(N, RngSeed(seed, (N,)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["cycle", "clique", "chordal"]), st.integers(3, 9),
       st.integers(0, 2**32 - 1), st.booleans())
def test_exact_moments_recover_kernel(family, N, seed, force_general):
    K = random_family_kernel(family, N, seed)
    res = estimate(MomentTable.from_kernel(K), K.alpha, force_general=force_general)
    graph_ok, signs_ok, dist = success_metrics(K, res)
    assert graph_ok and signs_ok
    assert dist <= 1e-12
    assert res.sign_system_status == SOLVED


def test_general_path_on_mixed_graph():
    # a 5-cycle sharing a vertex with a triangle: not chordal, sparsity 5
    M = 0.5 * np.eye(7)
    edges = [(0, 1, .2), (1, 2, -.2), (2, 3, .2), (3, 4, .2), (0, 4, -.2),
             (4, 5, .2), (5, 6, .2), (4, 6, -.2)]
    for i, j, v in edges:
        M[i, j] = M[j, i] = v
    K = Kernel(M, alpha=0.2)
    res = estimate(MomentTable.from_kernel(K), 0.2)
    assert res.path == "general" and res.sparsity_estimate == 5
    assert success_metrics(K, res)[:2] == (True, True)


def test_diagonal_kernel_samples_give_empty_graph():
    K = Kernel(0.5 * np.eye(4))
    res = estimate(sample(K, 20000, RngSeed(1)), 0.25)
    assert res.ghat.m == 0
    assert np.count_nonzero(res.khat.matrix - np.diag(np.diag(res.khat.matrix))) == 0
    assert res.sparsity_estimate == 2


def test_chordal_triangle_hand_example():
    K = cycle_kernel([1, 1, -1])
    res = estimate_chordal(MomentTable.from_kernel(K), 0.25)
    assert res.path == "chordal"
    assert rho(res.khat, K) == pytest.approx(0, abs=1e-15)
    assert res.signs.agrees_up_to_flips(SignAssignment.from_kernel(K))


def test_chordal_tree_is_all_positive():
    M = 0.5 * np.eye(4)
    for i, j, v in [(0, 1, -.25), (1, 2, .25), (1, 3, -.25)]:
        M[i, j] = M[j, i] = v
    K = Kernel(M)
    res = estimate(MomentTable.from_kernel(K), 0.25)
    assert res.path == "chordal" and set(res.signs.signs) == {1}
    assert rho(res.khat, K) == pytest.approx(0, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1))
def test_chordal_and_general_paths_agree(N, seed):
    K = gen_chordal_kernel(N, RngSeed(seed))
    m = MomentTable.from_kernel(K)
    a = estimate(m, K.alpha)
    b = estimate(m, K.alpha, force_general=True)
    assert a.path == "chordal" and b.path == "general"
    assert rho(a.khat, b.khat) <= 1e-12


def test_estimate_chordal_falls_back_on_cycles():
    K = cycle_kernel([1, -1, 1, 1, 1])
    res = estimate_chordal(MomentTable.from_kernel(K), 0.25)
    assert res.path == "general"


def test_success_metrics_examples():
    K = cycle_kernel([1, -1, 1, 1, -1])
    res = estimate(MomentTable.from_kernel(K), 0.25)
    assert success_metrics(K, res) == (True, True, pytest.approx(0, abs=1e-15))
    # drop one edge from the estimated graph
    keep = res.ghat.edges[1:]
    G = UGraph(5, keep)
    res.ghat = G
    res.signs = SignAssignment(G, res.signs.signs[1:])
    assert success_metrics(K, res)[:2] == (False, False)


def test_success_metrics_detects_flipped_cycle_sign():
    K = cycle_kernel([1, -1, 1, 1, -1])
    m = MomentTable.from_kernel(K)
    G, B, kd = recover_graph(m, 0.25)
    res = estimate(m, 0.25)
    h = [-x for x in res.hhat]
    signs, status, _ = recover_signs(G, res.basis, h)
    res.signs = signs
    assert success_metrics(K, res)[:2] == (True, False)


def test_alpha_validation():
    with pytest.raises(InputError):
        estimate(MomentTable.from_samples(THREE), 0.0)
    with pytest.raises(InputError):
        estimate([[0]], 0.25)


def test_estimate_is_flip_invariant(rng):
    K = gen_cycle_kernel(6, RngSeed(4))
    flipped = dn_conjugate(K, rng.choice([-1, 1], 6))
    a = estimate(MomentTable.from_kernel(K), 0.25)
    b = estimate(MomentTable.from_kernel(flipped), 0.25)
    assert rho(a.khat, b.khat) <= 1e-12


def test_bhat_histogram():
    h = bhat_histogram(np.array([[0, .1, .2], [.1, 0, .3], [.2, .3, 0]]), bins=3)
    assert sum(h["counts"]) == 3 and len(h["edges"]) == 4
    assert bhat_histogram(np.zeros((1, 1))) == {"counts": [], "edges": []}


def test_minor_table_from_kernel_uses_determinants():
    K = gen_cycle_kernel(4, RngSeed(2))
    m = MomentTable.from_kernel(K)
    assert m[[0, 1, 2, 3]] == pytest.approx(minor(K, range(4)))


def test_stability_envelope_fails_for_large_pair_noise():
    """At eps = alpha^2/16 the eps-errors flip the C5 sign statistic."""
    from perturb import gradient_adversary, perturbed_estimate

    alpha, eps = 0.25, 0.25 ** 2 / 16
    K = Kernel.unchecked(0.5 * np.eye(5) + 0.25 * cycle_graph(5).adjacency_matrix(), alpha)
    res = perturbed_estimate(K, alpha, eps, gradient_adversary(K, alpha, eps))
    assert rho(res.khat, K) >= 4 * eps / alpha
    small = perturbed_estimate(K, alpha, eps / 16, gradient_adversary(K, alpha, eps / 16))
    assert rho(small.khat, K) < eps / 4 / alpha
