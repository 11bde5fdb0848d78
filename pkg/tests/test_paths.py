from itertools import combinations

import pytest

from hypermatch.chain import TransitionKind, transition_probability
from hypermatch.core import validate
from hypermatch.counting import enumerate_matchings
from hypermatch.errors import NotCombFree, TransitionNotOnPath
from hypermatch.paths import (
    canonical_path,
    check_path_properties,
    congestion_report,
    decode,
    eta,
    in_omega_prime,
    omega_prime,
)
from oracles import brute_matchings


def disjoint_sets(edges, subset):
    sets = [set(edges[i]) for i in subset]
    return all(not (a & b) for a, b in combinations(sets, 2))


def omega_prime_oracle(edges):
    """Edge sets that become a matching after dropping at most one edge."""
    out = set()
    m = len(edges)
    for size in range(m + 1):
        for S in combinations(range(m), size):
            if disjoint_sets(edges, S) or any(
                disjoint_sets(edges, [x for x in S if x != e]) for e in S
            ):
                out.add(frozenset(S))
    return out


def test_path_on_single_swap():
    # [DERIVED] I = {a}, F = {b}, a and b meet: one swap
    H = validate([(1, 2, 3), (3, 4, 5)], 5, 3)
    p = canonical_path(H, {0}, {1})
    assert p.matchings == (frozenset({0}), frozenset({1}))
    assert p.kinds == (TransitionKind.SWAP,)


def test_path_on_alternating_cycle():
    # 2-graph hexagon: I the odd edges, F the even ones; a cycle of six
    H = validate([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)], 6, 2)
    I, F = {0, 2, 4}, {1, 3, 5}
    p = canonical_path(H, I, F)
    assert p.kinds[0] is TransitionKind.REMOVE and p.kinds[-1] is TransitionKind.ADD
    assert all(k is TransitionKind.SWAP for k in p.kinds[1:-1])
    assert p.length == 4  # remove, two swaps, add
    assert not check_path_properties(H, frozenset(I), frozenset(F), p)
    # e_1 holds vertex 1, the smallest vertex covered by I
    assert p.matchings[1] == frozenset({2, 4})


def test_path_processes_components_by_min_vertex():
    H = validate([(1, 2, 3), (4, 5, 6), (7, 8, 9)], 9, 3)
    p = canonical_path(H, set(), {0, 1, 2})
    assert [sorted(M) for M in p.matchings] == [[], [0], [0, 1], [0, 1, 2]]


def test_path_rejects_comb():
    H = validate([(1, 2, 3), (1, 4, 5), (2, 6, 7), (3, 8, 9)], 9, 3)
    with pytest.raises(NotCombFree):
        canonical_path(H, [], [1, 2, 3])


def test_properties_and_round_trip_all_pairs(zoo):
    for name, H in zoo.items():
        states = enumerate_matchings(H)
        if len(states) > 40:
            continue
        for I in states:
            for F in states:
                p = canonical_path(H, I, F)
                assert not check_path_properties(H, I, F, p), (name, I, F)
                for M, M2 in p.transitions():
                    assert transition_probability(H, M, M2) > 0
                    img = eta(H, I, F, M, M2, p)
                    assert decode(H, M, M2, img) == (I, F)


def test_eta_requires_transition_on_path():
    H = validate([(1, 2, 3), (3, 4, 5)], 5, 3)
    with pytest.raises(TransitionNotOnPath):
        eta(H, {0}, {1}, {1}, {0})


def test_decode_rejects_foreign_images():
    H = validate([(1, 2, 3), (3, 4, 5), (5, 6, 7)], 7, 3)
    # the transition ∅ -> {0} with an image that no pair produces
    assert decode(H, set(), {0}, {0, 1, 2}) is None
    assert decode(H, {0}, {0}, {0}) is None


def test_omega_prime_membership(zoo):
    for name in ("overlap-8", "two-meeting", "blowup-33", "tight-6"):
        H = zoo[name]
        ref = omega_prime_oracle(H.edges)
        got = omega_prime(H, brute_matchings(H.edges))
        assert got == ref, name
        all_sets = [frozenset(S) for r in range(H.m + 1) for S in combinations(range(H.m), r)]
        assert {S for S in all_sets if in_omega_prime(H, S)} == ref


def test_congestion_single_edge():
    # [DERIVED] two states; the pair (∅, {e}) and its reverse each use one transition
    H = validate([(1, 2, 3)], 3, 3)
    rep = congestion_report(H)
    assert rep.n_states == 2
    assert rep.omega_prime == 2
    assert [r.paths for r in rep.rows] == [1, 1]
    assert rep.ok


def test_congestion_report_clean(zoo):
    for name in ("overlap-12", "hex-1x1", "subdivided", "graph-c6"):
        rep = congestion_report(zoo[name], cut_samples=50)
        assert rep.ok, (name, rep.summary())
        assert rep.max_congestion <= rep.omega_prime
        csv_text = rep.to_csv()
        assert csv_text.splitlines()[0] == "transition,paths,omega_prime,certificate"
        assert len(csv_text.splitlines()) == len(rep.rows) + 1
