"""k-independence: witnesses, exact solver, bands, and first-moment math."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from starsat import (
    FirstMomentInput,
    ProbParams,
    RngSeed,
    alpha_k_exact,
    alpha_k_predicted_band,
    binomial_tail_upper,
    binomial_tail_upper_exact,
    clique_cover_bound,
    complete_graph,
    cycle_graph,
    empty_graph,
    exact_binomial_cdf,
    first_moment_Xs,
    first_moment_Xs_exact,
    greedy_k_independent,
    is_k_independent,
    petersen_graph,
    sample_gnp,
)

from oracles import alpha_k_brute, first_moment_enum, random_graphs


# ---------------------------------------------------------- is_k_independent

def test_membership_examples():
    c5 = cycle_graph(5)
    assert is_k_independent(c5, {0, 2}, 0)
    assert not is_k_independent(c5, {0, 1, 2}, 1)
    assert is_k_independent(c5, {0, 1, 3}, 1)


def test_membership_rejects_bad_vertex():
    with pytest.raises(ValueError):
        is_k_independent(cycle_graph(5), {0, 9}, 0)


def test_empty_set_is_always_independent():
    assert is_k_independent(complete_graph(5), set(), 0)


# ------------------------------------------------------------------- greedy

def test_greedy_edgeless_takes_everything():
    w = greedy_k_independent(empty_graph(7), 0)
    assert w.vertices == tuple(range(7)) and w.size == 7


def test_greedy_k4_takes_one():
    assert greedy_k_independent(complete_graph(4), 0).size == 1


def test_greedy_c5_scan_order():
    # hand simulation: 2 rejected (1 would reach degree 2), 4 rejected
    # (0 would reach degree 2)
    w = greedy_k_independent(cycle_graph(5), 1, order=(0, 1, 2, 3, 4))
    assert w.vertices == (0, 1, 3)


def test_greedy_result_is_maximal():
    for g in random_graphs(20, 3, 10):
        for k in (0, 1):
            w = greedy_k_independent(g, k)
            assert is_k_independent(g, w.vertices, k)
            for v in range(g.n):
                if v not in w.vertices:
                    assert not is_k_independent(g, set(w.vertices) | {v}, k)


def test_greedy_rejects_non_permutation():
    with pytest.raises(ValueError):
        greedy_k_independent(cycle_graph(5), 0, order=(0, 1, 2))


# ----------------------------------------------------------------- alpha_k

def test_alpha_examples():
    assert alpha_k_exact(complete_graph(4), 0).witness.size == 1
    assert alpha_k_exact(cycle_graph(5), 1).witness.size == 3


def test_alpha_whole_graph_when_k_at_least_max_degree():
    g = sample_gnp(9, 0.4, RngSeed(8))
    res = alpha_k_exact(g, g.max_degree())
    assert res.witness.size == g.n


def test_alpha_petersen_values():
    pet = petersen_graph()
    assert alpha_k_exact(pet, 0).witness.size == 4
    assert alpha_k_exact(pet, 1).witness.size == 6


def test_alpha_matches_bruteforce():
    for i, g in enumerate(random_graphs(120, 2, 10)):
        k = i % 3
        res = alpha_k_exact(g, k)
        assert res.optimal
        assert res.witness.size == alpha_k_brute(g, k)
        assert is_k_independent(g, res.witness.vertices, k)


def test_alpha_monotone_in_k():
    for g in random_graphs(40, 3, 12):
        sizes = [alpha_k_exact(g, k).witness.size for k in range(4)]
        assert sizes == sorted(sizes)


def test_alpha_dominates_greedy():
    for g in random_graphs(25, 3, 10):
        for k in (0, 1, 2):
            exact = alpha_k_exact(g, k).witness.size
            for order_seed in (0, 1, 2):
                order = list(range(g.n))
                if order_seed:
                    import starsat.rng as rng

                    rng.Stream(order_seed).shuffle(order)
                assert greedy_k_independent(g, k, order).size <= exact


def test_alpha_budget_exhaustion_is_flagged():
    g = sample_gnp(30, 0.5, RngSeed(17))
    res = alpha_k_exact(g, 1, budget=3)
    assert not res.optimal
    assert is_k_independent(g, res.witness.vertices, 1)
    assert res.witness.size <= res.upper_bound
    full = alpha_k_exact(g, 1)
    assert full.optimal
    assert res.witness.size <= full.witness.size <= res.upper_bound


def test_clique_cover_bound_is_an_upper_bound():
    for i, g in enumerate(random_graphs(30, 3, 10)):
        k = i % 3
        assert clique_cover_bound(g, k) >= alpha_k_brute(g, k)


# -------------------------------------------------------------------- band

def test_band_k0_value():
    lo, hi = alpha_k_predicted_band(500, ProbParams(0.5), 0)
    assert hi == pytest.approx(2 * math.log2(500) - 1, abs=1e-9)
    assert hi == pytest.approx(16.93157, abs=1e-4)
    assert lo < hi


def test_band_k1_value():
    _, hi = alpha_k_predicted_band(500, ProbParams(0.5), 1)
    assert hi == pytest.approx(2 * math.log2(500) - 1 + 2 * math.log2(math.log2(500)), abs=1e-9)
    assert hi == pytest.approx(23.26, abs=0.01)


def test_band_spacing_linear_in_k():
    params = ProbParams(0.3)
    for n in (10, 100, 5000):
        step = 2 * math.log(math.log(n, 1 / 0.7), 1 / 0.7)
        his = [alpha_k_predicted_band(n, params, k)[1] for k in range(4)]
        for a, b in zip(his, his[1:]):
            assert b - a == pytest.approx(step, rel=1e-12)


def test_band_rejects_tiny_n():
    with pytest.raises(ValueError):
        alpha_k_predicted_band(2, ProbParams(0.5), 0)


# -------------------------------------------------------------- tail bound

def test_tail_bound_examples():
    assert binomial_tail_upper(2, 0, 0.5) == pytest.approx(0.25, rel=1e-12)
    assert binomial_tail_upper(10, 2, 0.3) == pytest.approx(45 * 0.7**8, rel=1e-12)
    assert binomial_tail_upper(9, 9, 0.42) == pytest.approx(1.0, rel=1e-12)


def test_tail_bound_equals_cdf_at_degenerate_point():
    assert exact_binomial_cdf(2, 0, Fraction(1, 2)) == Fraction(1, 4)
    assert binomial_tail_upper_exact(2, 0, Fraction(1, 2)) == Fraction(1, 4)


def test_tail_bound_rejects_bad_s():
    with pytest.raises(ValueError):
        binomial_tail_upper(5, 6, 0.5)
    with pytest.raises(ValueError):
        binomial_tail_upper(5, -1, 0.5)


def test_tail_bound_dominates_cdf_small_sweep():
    for trials in (1, 4, 9, 16):
        for s in range(trials + 1):
            for tenths in range(1, 10):
                p = Fraction(tenths, 10)
                assert exact_binomial_cdf(trials, s, p) <= binomial_tail_upper_exact(trials, s, p)


def test_tail_bound_no_overflow_at_large_n():
    val = binomial_tail_upper(100_000, 50, 0.5)
    assert math.isfinite(val) and val >= 0.0


def test_exact_cdf_reference():
    # P(Bin(3, 1/2) <= 1) = (1 + 3) / 8
    assert exact_binomial_cdf(3, 1, Fraction(1, 2)) == Fraction(1, 2)
    assert exact_binomial_cdf(6, 2, Fraction(1, 2)) == Fraction(22, 64)


# ------------------------------------------------------------ first moment

def test_first_moment_single_vertex_subsets():
    inp = FirstMomentInput(9, ProbParams(0.37), 2, 1)
    assert first_moment_Xs(inp) == 9.0


def test_first_moment_triangle_case():
    inp = FirstMomentInput(3, ProbParams(0.5), 1, 3)
    assert first_moment_Xs(inp) == pytest.approx(0.5, rel=1e-12)


def test_first_moment_pinned_value():
    inp = FirstMomentInput(12, ProbParams(0.5), 1, 4)
    assert first_moment_Xs_exact(inp) == Fraction(10890, 64)
    assert first_moment_Xs(inp) == pytest.approx(170.15625, rel=1e-12)


def test_first_moment_matches_pattern_enumeration():
    # independent oracle: enumerate all 2^C(s,2) edge patterns; the oracle
    # receives the exact binary value of the float probability
    for n, p, k, s in [(6, 0.5, 0, 3), (8, 0.3, 1, 4), (12, 0.5, 1, 4), (7, 0.7, 2, 5)]:
        inp = FirstMomentInput(n, ProbParams(p), k, s)
        assert first_moment_Xs_exact(inp) == first_moment_enum(n, Fraction(p), k, s)


def test_first_moment_input_validation():
    with pytest.raises(ValueError):
        FirstMomentInput(5, ProbParams(0.5), 1, 0)
    with pytest.raises(ValueError):
        FirstMomentInput(5, ProbParams(0.5), 1, 6)
