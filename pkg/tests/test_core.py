import json
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermatch.core import (
    ComponentKind,
    Owner,
    decompose,
    disjoint_union,
    find_three_comb,
    intersection_graph,
    is_comb_free,
    is_matching,
    parse_hypergraph,
    as_matching,
    validate,
)
from hypermatch.errors import (
    DegreeViolation,
    DuplicateEdge,
    DuplicateVertexInEdge,
    IndexOutOfRange,
    NotAMatching,
    ParseError,
    VertexOutOfRange,
    WrongEdgeSize,
)
from oracles import has_induced_claw, line_graph


def comb_example():
    # a centre edge touching three disjoint edges
    return validate([(1, 2, 3), (1, 4, 5), (2, 6, 7), (3, 8, 9)], 9, 3)


def test_validate_sorts_vertices_and_keeps_order():
    H = validate([[3, 1, 2], [5, 4, 3]], 5, 3)
    assert H.edges == ((1, 2, 3), (3, 4, 5))
    assert H.m == 2


@pytest.mark.parametrize(
    "edges, n, k, err",
    [
        ([(1, 2)], 3, 3, WrongEdgeSize),
        ([(1, 2, 4)], 3, 3, VertexOutOfRange),
        ([(0, 1, 2)], 3, 3, VertexOutOfRange),
        ([(1, 1, 2)], 3, 3, DuplicateVertexInEdge),
        ([(1, 2, 3), (3, 2, 1)], 3, 3, DuplicateEdge),
    ],
)
def test_validate_rejects(edges, n, k, err):
    with pytest.raises(err):
        validate(edges, n, k)


def test_parse_both_formats_agree():
    doc = {"n": 5, "k": 3, "edges": [[1, 2, 3], [3, 4, 5]], "name": "extra keys are fine"}
    a = parse_hypergraph(json.dumps(doc))
    b = parse_hypergraph("# two triples\n5 3 2\n1 2 3\n3 4 5\n")
    assert a == b
    assert parse_hypergraph(a.dumps()) == a


@pytest.mark.parametrize(
    "text",
    ["", "{bad json", '{"n": 3, "k": 3}', "3 3 2\n1 2 3\n", "3 3\n1 2 3\n", "3 3 1\n1 x 3\n"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_hypergraph(text)


def test_intersection_graph_of_path():
    H = validate([(1, 2, 3), (3, 4, 5), (5, 6, 7), (8, 9, 10)], 10, 3)
    L = intersection_graph(H)
    assert L.edge_list() == [(0, 1), (1, 2)]
    assert L.max_degree() == 2
    assert L.degree(3) == 0


def test_three_comb_witness():
    H = comb_example()
    a, b, c, center = find_three_comb(H)
    assert center == 0 and (a, b, c) == (1, 2, 3)
    assert not is_comb_free(H)
    # two teeth are not enough
    assert is_comb_free(H.prefix(3))


def test_pair_sharing_two_vertices_is_not_a_comb():
    H = validate([(1, 2, 3), (1, 2, 4), (3, 5, 6), (4, 7, 8)], 8, 3)
    assert find_three_comb(H) is None


@st.composite
def small_hypergraphs(draw, max_n=9, max_m=10):
    k = draw(st.integers(2, 4))
    n = draw(st.integers(k, max_n))
    pool = list(combinations(range(1, n + 1), k))
    chosen = draw(st.lists(st.sampled_from(pool), max_size=max_m, unique=True))
    return validate(chosen, n, k)


@settings(max_examples=150, deadline=None)
@given(small_hypergraphs())
def test_comb_iff_claw_in_line_graph(H):
    assert (find_three_comb(H) is None) == (not has_induced_claw(line_graph(H.edges)))


def test_is_matching_and_errors():
    H = validate([(1, 2, 3), (3, 4, 5), (6, 7, 8)], 8, 3)
    assert is_matching(H, [0, 2])
    assert not is_matching(H, [0, 1])
    assert is_matching(H, [])
    with pytest.raises(IndexOutOfRange):
        is_matching(H, [3])
    with pytest.raises(NotAMatching):
        as_matching(H, [0, 1])


def test_decompose_even_path_odd_path_cycle():
    # cycle 1-2-3-4-5-6-1 made of 2-edges, plus a separate path
    H = validate(
        [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (7, 8), (8, 9), (9, 10)], 10, 2
    )
    I = {0, 2, 4, 6, 8}
    F = {1, 3, 5, 7}
    D = decompose(H, I, F)
    kinds = [c.kind for c in D]
    assert kinds == [ComponentKind.CYCLE, ComponentKind.ODD_PATH]
    cyc = D[0]
    assert cyc.min_vertex == 1 and cyc.size == 6
    assert sorted(cyc.edges) == [0, 1, 2, 3, 4, 5]
    assert D[1].owners == (Owner.I, Owner.F, Owner.I, Owner.F, Owner.I)[: D[1].size]

    D2 = decompose(H, {0}, {1})
    assert D2[0].kind is ComponentKind.EVEN_PATH


def test_decompose_partitions_difference(zoo):
    from hypermatch.counting import enumerate_matchings

    for H in zoo.values():
        states = enumerate_matchings(H)
        for I in states[:12]:
            for F in states[-12:]:
                D = decompose(H, I, F)
                edges = [e for c in D for e in c.edges]
                assert sorted(edges) == sorted(I ^ F)
                for c in D:
                    for e, o in zip(c.edges, c.owners):
                        assert (e in I) == (o is Owner.I)
                    # consecutive edges of a traversal meet
                    for a, b in zip(c.edges, c.edges[1:]):
                        assert H.masks[a] & H.masks[b]
                mins = [c.min_vertex for c in D]
                assert mins == sorted(mins)


def test_decompose_reports_degree_violation():
    H = comb_example()
    with pytest.raises(DegreeViolation):
        decompose(H, {0}, {1, 2, 3})


def test_disjoint_union_shifts_vertices():
    A = validate([(1, 2, 3)], 3, 3)
    U = disjoint_union(A, A)
    assert U.edges == ((1, 2, 3), (4, 5, 6)) and U.n == 6
