"""Saturation certificates, bounds, the exact solver, and reference formulas."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from starsat import (
    Graph,
    ProbParams,
    RngSeed,
    SaturationCertificate,
    check_certificate,
    classical_sat_clique,
    classical_sat_star,
    complete_graph,
    construct_upper,
    cycle_graph,
    empty_graph,
    greedy_saturated,
    petersen_graph,
    reference_bands,
    sample_gnp,
    sat_exact,
    sat_lower_bound,
)

from oracles import min_maximal_matching_brute, random_graphs, sat_brute


# ------------------------------------------------------- check_certificate

def test_check_perfect_matching_in_k4():
    cert = check_certificate([(0, 1), (2, 3)], complete_graph(4), 2)
    assert cert.verdict == "valid"
    assert cert.offending_edge is None


def test_check_empty_subgraph_not_maximal():
    cert = check_certificate([], complete_graph(4), 2)
    assert cert.verdict == "not-edge-maximal"
    assert cert.offending_edge == (0, 1)


def test_check_cycle_missing_edge():
    c5 = cycle_graph(5)
    h = [e for e in c5.edges() if e != (0, 1)]
    cert = check_certificate(h, c5, 3)
    assert cert.verdict == "not-edge-maximal"
    assert cert.offending_edge == (0, 1)


def test_check_full_cycle_valid():
    c5 = cycle_graph(5)
    assert check_certificate(c5.edges(), c5, 3).verdict == "valid"


def test_check_flags_star():
    cert = check_certificate([(0, 1), (0, 2)], complete_graph(4), 2)
    assert cert.verdict == "not-star-free"


def test_check_rejects_foreign_edges():
    with pytest.raises(ValueError):
        check_certificate([(0, 2)], Graph.from_edges(3, [(0, 1), (1, 2)]), 2)


def test_check_rejects_small_r():
    with pytest.raises(ValueError):
        check_certificate([], complete_graph(3), 1)


def test_whole_host_valid_iff_star_free():
    for g in random_graphs(40, 2, 9):
        for r in (2, 3, 4):
            cert = check_certificate(g.edges(), g, r)
            assert (cert.verdict == "valid") == (g.max_degree() <= r - 1)


def test_certificate_json_round_trip():
    cert = check_certificate([(0, 1), (2, 3)], complete_graph(4), 2)
    again = SaturationCertificate.from_json(cert.to_json())
    assert again == cert


def test_certificate_hash_detects_host_swap():
    cert = check_certificate([(0, 1), (2, 3)], complete_graph(4), 2)
    from starsat import graph_hash

    assert cert.host_hash == graph_hash(complete_graph(4))
    assert cert.host_hash != graph_hash(cycle_graph(4))


# -------------------------------------------------------- sat_lower_bound

def test_lower_bound_k4():
    lb = sat_lower_bound(complete_graph(4), 2)
    assert lb.value == Fraction(3, 2)
    assert lb.alpha_value == 1
    assert lb.certified


def test_lower_bound_edgeless_is_zero():
    lb = sat_lower_bound(empty_graph(6), 3)
    assert lb.value == 0 and lb.alpha_value == 6


def test_lower_bound_c5():
    lb = sat_lower_bound(cycle_graph(5), 3)
    assert lb.value == Fraction(2, 1)


def test_lower_bound_greedy_mode_is_uncertified():
    lb = sat_lower_bound(complete_graph(6), 3, "greedy-upper")
    assert not lb.certified


def test_lower_bound_rejects_unknown_method():
    with pytest.raises(ValueError):
        sat_lower_bound(complete_graph(4), 2, "magic")


# -------------------------------------------------------- greedy_saturated

def test_greedy_k4_lexicographic():
    cert = greedy_saturated(complete_graph(4), 2)
    assert cert.edges == ((0, 1), (2, 3))
    assert cert.verdict == "valid"


def test_greedy_edgeless():
    cert = greedy_saturated(empty_graph(5), 3)
    assert cert.edges == () and cert.verdict == "valid"


def test_greedy_keeps_everything_when_host_is_star_free():
    g = cycle_graph(7)  # max degree 2
    cert = greedy_saturated(g, 3)
    assert sorted(cert.edges) == g.edges()


def test_greedy_respects_order():
    # feeding the reversed edge list changes which edge survives
    tri = complete_graph(3)
    lex = greedy_saturated(tri, 2)
    rev = greedy_saturated(tri, 2, order=list(reversed(tri.edges())))
    assert lex.edges == ((0, 1),)
    assert rev.edges == ((1, 2),)
    assert check_certificate(rev.edges, tri, 2).verdict == "valid"


def test_greedy_always_valid_on_corpus():
    for g in random_graphs(60, 2, 10):
        for r in (2, 3):
            cert = greedy_saturated(g, r)
            assert cert.verdict == "valid"
            assert check_certificate(cert.edges, g, r).verdict == "valid"


# --------------------------------------------------------- construct_upper

def test_construct_k4():
    rep = construct_upper(complete_graph(4), 2)
    assert rep.upper == 2 and rep.ell_used == 0
    assert rep.certificate.verdict == "valid"


def test_construct_c5():
    rep = construct_upper(cycle_graph(5), 3)
    assert rep.upper == 5 and rep.ell_used == 0


def test_construct_edgeless():
    # S = V(G) is independent and the empty residual trivially factors
    rep = construct_upper(empty_graph(5), 3)
    assert rep.upper == 0
    assert rep.certificate.verdict == "valid"


def test_construct_factor_route_edge_count():
    for i in range(6):
        g = sample_gnp(60, 0.5, RngSeed(52, i))
        r = 2 + i % 2
        rep = construct_upper(g, r, is_method="greedy")
        assert rep.upper == len(rep.certificate.edges)
        if rep.ell_used > 0:
            assert rep.upper == (g.n - rep.ell_used) * (r - 1) // 2
        assert check_certificate(rep.certificate.edges, g, r).verdict == "valid"
        assert rep.lower_ceiled is None or rep.lower_ceiled <= rep.upper


def test_construct_exact_mode_reports_alpha_status():
    g = sample_gnp(30, 0.5, RngSeed(53))
    rep = construct_upper(g, 2, is_method="exact")
    assert rep.alpha_optimal
    assert rep.independent_set is not None
    assert rep.ell_used == len(rep.independent_set)
    from starsat import is_k_independent

    assert is_k_independent(g, rep.independent_set, 0)


def test_construct_rejects_unknown_method():
    with pytest.raises(ValueError):
        construct_upper(complete_graph(4), 2, is_method="psychic")


# --------------------------------------------------------------- sat_exact

def test_sat_exact_k4():
    rep = sat_exact(complete_graph(4), 2)
    assert rep.exact == 2
    assert check_certificate(rep.certificate.edges, complete_graph(4), 2).verdict == "valid"


def test_sat_exact_c5_r3():
    assert sat_exact(cycle_graph(5), 3).exact == 5


def test_sat_exact_edgeless():
    assert sat_exact(empty_graph(6), 4).exact == 0


def test_sat_exact_petersen_values():
    assert sat_exact(petersen_graph(), 2).exact == 3
    assert sat_exact(petersen_graph(), 3).exact == 8


def test_sat_exact_matches_bruteforce():
    for i, g in enumerate(random_graphs(60, 3, 7)):
        r = 2 + i % 2
        rep = sat_exact(g, r)
        assert rep.exact == sat_brute(g, r)
        assert check_certificate(rep.certificate.edges, g, r).verdict == "valid"
        assert len(rep.certificate.edges) == rep.exact


def test_sat_exact_sandwich():
    for i, g in enumerate(random_graphs(40, 3, 10)):
        r = 2 + i % 2
        rep = sat_exact(g, r)
        lb = sat_lower_bound(g, r)
        greedy = greedy_saturated(g, r)
        upper = construct_upper(g, r)
        assert math.ceil(lb.value) <= rep.exact
        assert rep.exact <= len(greedy.edges)
        assert rep.exact <= upper.upper


def test_sat_exact_r2_is_min_maximal_matching():
    for g in random_graphs(50, 2, 9):
        assert sat_exact(g, 2).exact == min_maximal_matching_brute(g)


def test_sat_exact_small_complete_graphs():
    for n, r in [(3, 2), (5, 2), (6, 3), (7, 4)]:
        assert sat_exact(complete_graph(n), r).exact == classical_sat_star(n, r)


def test_sat_exact_budget_exhaustion_keeps_bounds():
    g = sample_gnp(16, 0.5, RngSeed(54))
    rep = sat_exact(g, 3, budget=5)
    assert rep.exact is None
    assert rep.upper is not None
    assert math.ceil(rep.lower) <= rep.upper
    full = sat_exact(g, 3)
    assert full.exact is not None
    assert math.ceil(rep.lower) <= full.exact <= rep.upper


# ------------------------------------------------------ closed-form values

def test_classical_star_values():
    assert classical_sat_star(4, 3) == 3    # dense case: C(3,2) + C(1,2)
    assert classical_sat_star(3, 2) == 1
    assert classical_sat_star(6, 3) == 5
    assert classical_sat_star(10, 2) == 5  # ceil(10/2 - 1/2)


def test_classical_star_domain():
    with pytest.raises(ValueError):
        classical_sat_star(3, 3)


def test_classical_clique_values():
    assert classical_sat_clique(3, 3) == 2
    assert classical_sat_clique(4, 3) == 3
    for n in (2, 5, 17):
        assert classical_sat_clique(n, 2) == 0


def test_classical_clique_domain():
    with pytest.raises(ValueError):
        classical_sat_clique(2, 3)


def test_reference_bands_zito():
    bands = reference_bands(100, ProbParams(0.5), 2, 0.5)
    lo, hi = bands.zito
    assert lo == pytest.approx(50 - math.log2(50), abs=1e-9)
    assert hi == pytest.approx(50 - math.log2(10), abs=1e-9)
    assert (lo, hi) == (pytest.approx(44.356, abs=1e-3), pytest.approx(46.678, abs=1e-3))


def test_reference_bands_main():
    bands = reference_bands(1024, ProbParams(0.5), 3, 0.1)
    assert bands.main == (pytest.approx(1002.0), pytest.approx(1006.0))


def test_reference_bands_zito_only_for_r2():
    assert reference_bands(100, ProbParams(0.5), 3, 0.5).zito is None


def test_reference_bands_epsilon_zero_collapses():
    bands = reference_bands(200, ProbParams(0.3), 4, 0.0)
    assert bands.main[0] == bands.main[1]
