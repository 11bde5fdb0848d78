from collections import Counter
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from scipy import stats

from hypermatch.chain import (
    TransitionKind,
    analyze,
    apply_edge,
    build_transition_matrix,
    conductance,
    exact_mixing_bound,
    pack_state,
    run_chains,
    step,
    theoretical_mixing_bound,
    transition_probability,
    unpack_states,
)
from hypermatch.core import is_matching, validate
from hypermatch.errors import EmptyEdgeSet, NotCombFree, StateSpaceTooLarge
from hypermatch.generators import gen_enriched_tight_cycle, gen_overlap_cycle
from oracles import brute_conductance, brute_matchings, fraction_matrix, tv_curve


def single_edge():
    return validate([(1, 2, 3)], 3, 3)


def test_single_edge_matrix():
    # [DERIVED] states ∅ and {e}; each moves to the other with prob 1/2
    T = build_transition_matrix(single_edge())
    assert T.size == 2
    assert [[T.prob(i, j) for j in range(2)] for i in range(2)] == [
        [Fraction(1, 2), Fraction(1, 2)],
        [Fraction(1, 2), Fraction(1, 2)],
    ]
    assert conductance(T) == Fraction(1, 2)


def test_two_meeting_edges_matrix():
    # [DERIVED] states ∅, {a}, {b}; ∅ -> a, ∅ -> b, a <-> b by swap
    H = validate([(1, 2, 3), (3, 4, 5)], 5, 3)
    T = build_transition_matrix(H)
    quarter = Fraction(1, 4)
    for i in range(3):
        for j in range(3):
            assert T.prob(i, j) == (Fraction(1, 2) if i == j else quarter)
    assert T.p_min() == quarter
    assert conductance(T) == Fraction(1, 2)


def test_apply_edge_kinds():
    H = validate([(1, 2, 3), (3, 4, 5), (5, 6, 7), (8, 9, 10)], 10, 3)
    M = frozenset({0, 2})
    assert apply_edge(H, M, 0) == (frozenset({2}), TransitionKind.REMOVE)
    assert apply_edge(H, M, 3) == (frozenset({0, 2, 3}), TransitionKind.ADD)
    assert apply_edge(H, M, 1) == (M, TransitionKind.NULL)
    assert apply_edge(H, frozenset({0}), 1) == (frozenset({1}), TransitionKind.SWAP)


def test_matrix_matches_move_rules(zoo):
    for name, H in zoo.items():
        states = brute_matchings(H.edges)
        T = build_transition_matrix(H)
        assert set(T.states) == set(states), name
        P = fraction_matrix(H.edges, list(T.states))
        assert all(T.prob(i, j) == P[i][j] for i in range(T.size) for j in range(T.size)), name
        assert T.is_symmetric() and T.is_doubly_stochastic()
        assert T.min_diagonal() >= Fraction(1, 2)
        assert T.p_min() == Fraction(1, 2 * H.m)
        assert T.is_irreducible() and T.is_aperiodic() and T.uniform_is_stationary()


def test_transition_probability_agrees_with_matrix(zoo):
    H = zoo["overlap-8"]
    T = build_transition_matrix(H)
    for i, a in enumerate(T.states):
        for j, b in enumerate(T.states):
            assert transition_probability(H, a, b) == T.prob(i, j)


def test_state_cap():
    H = gen_enriched_tight_cycle(8, 3)
    with pytest.raises(StateSpaceTooLarge):
        build_transition_matrix(H, state_cap=20)


def test_conductance_matches_brute_force(zoo):
    for name in ("overlap-8", "two-disjoint", "blowup-222", "tight-6", "subdivided"):
        H = zoo[name]
        T = build_transition_matrix(H)
        P = fraction_matrix(H.edges, list(T.states))
        assert conductance(T) == brute_conductance(P), name


def test_exact_tv_curve_matches_fraction_oracle(zoo):
    H = zoo["overlap-8"]
    T = build_transition_matrix(H)
    res = analyze(T, epsilon=0.1, t_max=30)
    P = fraction_matrix(H.edges, list(T.states))
    ref = tv_curve(P, T.index[frozenset()], 30)
    assert [d for _, d in res.tv_curve] == pytest.approx([float(x) for x in ref], abs=1e-15)
    first = next(t for t, x in enumerate(ref) if x <= Fraction(1, 10))
    assert res.t_mix_exact == first


def test_float_path_agrees_with_exact_path(zoo):
    H = zoo["overlap-12"]
    T = build_transition_matrix(H)
    exact = analyze(T, 0.05, t_max=60)
    approx = analyze(T, 0.05, t_max=60, conductance_cap=4)
    assert approx.conductance is None and not approx.envelope_checked
    assert [d for _, d in approx.tv_curve] == pytest.approx([d for _, d in exact.tv_curve], abs=1e-12)
    assert approx.t_mix_exact == exact.t_mix_exact


def test_spectral_gap_relation(zoo):
    # Cheeger: gap >= Φ²/2 for a lazy reversible chain
    for H in zoo.values():
        T = build_transition_matrix(H)
        if T.size > 24:
            continue
        res = analyze(T, 0.25, t_max=5)
        phi = float(res.conductance)
        assert res.spectral_gap >= phi * phi / 2 - 1e-12


def test_step_single_step_frequencies():
    H = validate([(1, 2, 3), (3, 4, 5), (5, 6, 7)], 7, 3)
    T = build_transition_matrix(H)
    rng = np.random.default_rng(7)
    start = frozenset({1})
    counts = Counter(step(H, start, rng)[0] for _ in range(20000))
    i = T.index[start]
    observed = [counts.get(s, 0) for s in T.states]
    expected = [20000 * float(T.prob(i, j)) for j in range(T.size)]
    keep = [k for k, e in enumerate(expected) if e > 0]
    assert sum(observed[k] for k in keep) == 20000
    p = stats.chisquare([observed[k] for k in keep], [expected[k] for k in keep]).pvalue
    assert p > 1e-3


def test_run_chains_single_step_frequencies():
    H = validate([(1, 2, 3), (3, 4, 5), (5, 6, 7), (7, 8, 9)], 9, 3)
    T = build_transition_matrix(H)
    for start in (frozenset(), frozenset({1}), frozenset({0, 2})):
        batch = 40000
        s0 = np.tile(pack_state(start, H.m), (batch, 1))
        out = unpack_states(run_chains(H, batch, 1, np.random.default_rng(3), start=s0))
        counts = Counter(out)
        i = T.index[start]
        exp = {T.states[j]: batch * float(T.prob(i, j)) for j in range(T.size) if T.weights[i, j]}
        assert set(counts) <= set(exp)
        p = stats.chisquare([counts.get(s, 0) for s in exp], list(exp.values())).pvalue
        assert p > 1e-3


def test_run_chains_many_words_and_validity():
    # more than 64 edges forces the multi-word path
    H = gen_overlap_cycle(140, 3, 1)
    assert H.m == 70
    states = unpack_states(run_chains(H, 300, 200, np.random.default_rng(0)))
    assert all(is_matching(H, M) for M in states)
    assert max(len(M) for M in states) > 5


def test_run_chains_blocks_are_deterministic():
    H = gen_overlap_cycle(12, 3, 1)
    a = run_chains(H, 40000, 10, np.random.default_rng(5))
    b = run_chains(H, 40000, 10, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_step_needs_edges():
    with pytest.raises(EmptyEdgeSet):
        step(validate([], 3, 3), frozenset(), np.random.default_rng(0))


def test_theoretical_bound_shape():
    # the bound grows polynomially: doubling-ish n gives bounded ratios
    bounds = [theoretical_mixing_bound(gen_enriched_tight_cycle(n, 3), 0.1) for n in (8, 12, 16)]
    assert bounds == sorted(bounds)
    H = gen_enriched_tight_cycle(8, 3)
    inv_phi = 4 * H.n**3 * H.m
    assert bounds[0] >= 2 * inv_phi**2 * np.log(10)
    assert theoretical_mixing_bound(H, 0.01) > theoretical_mixing_bound(H, 0.1)


def test_theoretical_bound_rejects_comb():
    H = validate([(1, 2, 3), (1, 4, 5), (2, 6, 7), (3, 8, 9)], 9, 3)
    with pytest.raises(NotCombFree):
        theoretical_mixing_bound(H, 0.1)


def test_measured_mixing_within_bounds(zoo):
    for H in zoo.values():
        T = build_transition_matrix(H)
        if T.size > 24:
            continue
        res = analyze(T, 0.1, t_max=2000)
        assert res.t_mix_exact is not None
        assert res.t_mix_exact <= exact_mixing_bound(T.size, res.conductance, 0.1)
        assert res.t_mix_exact <= theoretical_mixing_bound(H, 0.1)


def test_graph_case_is_ordinary_matching_chain():
    # k = 2 reduces to the classical monomer-dimer chain; C6 has 18 matchings
    G = nx.cycle_graph(6)
    H = validate([(u + 1, v + 1) for u, v in G.edges()], 6, 2)
    T = build_transition_matrix(H)
    assert T.size == 18
