"""Constructors for the hypergraph families used as fixtures and benchmarks.

Positive families (3-comb-free by construction): overlapping cycles,
enriched tight cycles, subdivided 3-graphs, rooted blow-ups, hexagonal
lattice 3-graphs, windmill-free triangle 3-graphs and the graph-to-k-graph
reduction. The decorated square lattice is the negative fixture.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx
import numpy as np

from .core import Hypergraph, validate
from .errors import BadParameters


def _relabel(G: nx.Graph) -> tuple[dict, nx.Graph]:
    """Map graph nodes to 1..|V| in sorted order."""
    nodes = sorted(G.nodes())
    label = {v: i + 1 for i, v in enumerate(nodes)}
    return label, nx.relabel_nodes(G, label, copy=True)


def graph_from_hypergraph(H: Hypergraph) -> nx.Graph:
    """Read a 2-uniform hypergraph as a simple graph on 1..n."""
    if H.k != 2:
        raise BadParameters(f"expected a graph (k=2), got k={H.k}")
    G = nx.Graph()
    G.add_nodes_from(range(1, H.n + 1))
    G.add_edges_from(H.edges)
    return G


def graph_to_hypergraph(G: nx.Graph) -> Hypergraph:
    label, G = _relabel(G)
    return validate(sorted(tuple(sorted(e)) for e in G.edges()), len(label), 2)


# -- cycles -----------------------------------------------------------------

def gen_overlap_cycle(n: int, k: int, ell: int) -> Hypergraph:
    """The ``ell``-overlapping k-cycle on ``n`` cyclically ordered vertices.

    Edge ``i`` is the segment of ``k`` vertices starting at ``i(k-ell)+1``;
    there are ``n/(k-ell)`` edges and ``ell = k-1`` gives the tight cycle.
    """
    if k < 2 or not 1 <= ell <= k - 1:
        raise BadParameters(f"need k >= 2 and 1 <= ell <= k-1, got k={k}, ell={ell}")
    shift = k - ell
    if n % shift:
        raise BadParameters(f"k-ell={shift} must divide n={n}")
    if n // shift < 3:
        raise BadParameters("a cycle needs at least 3 edges")
    if n < 2 * k - ell:
        raise BadParameters(f"n={n} too small: consecutive edges would wrap (need n >= {2 * k - ell})")
    edges = [[(i * shift + j) % n + 1 for j in range(k)] for i in range(n // shift)]
    return validate(edges, n, k)


def gen_tight_cycle(n: int, k: int) -> Hypergraph:
    return gen_overlap_cycle(n, k, k - 1)


def gen_enriched_tight_cycle(n: int, k: int) -> Hypergraph:
    """Replace each edge of the (k-1)-overlapping (k+1)-cycle by its k-subsets."""
    if k < 3:
        raise BadParameters(f"enriched tight cycles need k >= 3, got {k}")
    if n % 2 or n < 2 * (k + 1):
        raise BadParameters(f"need even n >= {2 * (k + 1)}, got n={n}")
    base = gen_overlap_cycle(n, k + 1, k - 1)
    edges: list[tuple[int, ...]] = []
    seen = set()
    for e in base.edges:
        for sub in combinations(e, k):
            if sub not in seen:
                seen.add(sub)
                edges.append(sub)
    return validate(edges, n, k)


# -- random families --------------------------------------------------------

def _unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of 1..n in lexicographic order."""
    out = []
    x = 1
    for remaining in range(k, 0, -1):
        while True:
            block = math.comb(n - x, remaining - 1)
            if rank < block:
                out.append(x)
                x += 1
                break
            rank -= block
            x += 1
    return tuple(out)


def gen_random_kgraph(n: int, k: int, p: float, seed: int | None = None) -> Hypergraph:
    """Binomial random k-graph: each k-subset is an edge with probability p.

    The number of edges is drawn from Binomial(C(n,k), p) and that many
    distinct k-subsets are chosen uniformly, which has the same law as
    independent coin flips per subset.
    """
    if not 0 <= p <= 1:
        raise BadParameters(f"p must lie in [0, 1], got {p}")
    if k < 2 or n < 0:
        raise BadParameters(f"need k >= 2 and n >= 0, got n={n}, k={k}")
    total = math.comb(n, k)
    rng = np.random.default_rng(seed)
    if total == 0:
        return validate([], n, k)
    count = int(rng.binomial(total, p)) if total < 2**62 else int(round(total * p))
    if count == total:
        ranks = range(total)
    else:
        ranks = sorted(int(r) for r in rng.choice(total, size=count, replace=False))
    return validate([_unrank_combination(r, n, k) for r in ranks], n, k)


def gen_random_graph(n: int, p: float, seed: int | None = None) -> nx.Graph:
    G = nx.gnp_random_graph(n, p, seed=seed)
    return nx.relabel_nodes(G, {v: v + 1 for v in G.nodes()})


# -- triangle 3-graphs ------------------------------------------------------

def _triangles(G: nx.Graph) -> list[tuple[int, int, int]]:
    out = set()
    for u, v in G.edges():
        for w in set(G[u]) & set(G[v]):
            out.add(tuple(sorted((u, v, w))))
    return sorted(out)


def gen_triangle_3graph(G: nx.Graph) -> Hypergraph:
    """One 3-edge per triangle of ``G``; nodes are relabelled 1..|V| in sorted order."""
    _, G = _relabel(G)
    return validate(_triangles(G), G.number_of_nodes(), 3)


def find_windmill(G: nx.Graph) -> nx.Graph | None:
    """A windmill subgraph of ``G`` (9 vertices, 12 edges) or ``None``.

    A windmill is a central triangle plus three pairwise disjoint triangles,
    each meeting the central one in exactly one vertex, a different one each.
    """
    triangles = _triangles(G)
    through: dict = {}
    for t in triangles:
        for v in t:
            through.setdefault(v, []).append(t)
    for center in triangles:
        cs = set(center)
        blades = [
            [t for t in through[v] if set(t) & cs == {v}] for v in center
        ]
        for ta in blades[0]:
            for tb in blades[1]:
                if set(ta) & set(tb):
                    continue
                for tc in blades[2]:
                    if set(tc) & (set(ta) | set(tb)):
                        continue
                    W = nx.Graph()
                    for t in (center, ta, tb, tc):
                        W.add_edges_from(combinations(t, 2))
                    return W
    return None


def gen_triangle_3graph_random(n: int, p: float, seed: int | None = None) -> Hypergraph:
    return gen_triangle_3graph(gen_random_graph(n, p, seed))


# -- subdivision ------------------------------------------------------------

def gen_subdivided(H3: Hypergraph, nu: Sequence[int] | int = 1) -> Hypergraph:
    """Replace each triple ``e`` by the triples ``{v_i, v_j, x}`` for ``x`` in ``V_e``.

    ``V_e`` holds ``nu[e]`` fresh vertices, numbered after ``H3``'s vertices
    in edge order.
    """
    if H3.k != 3:
        raise BadParameters(f"subdivision needs a 3-graph, got k={H3.k}")
    if isinstance(nu, int):
        nu = [nu] * H3.m
    nu = list(nu)
    if len(nu) != H3.m or any(x < 1 for x in nu):
        raise BadParameters("need one multiplicity >= 1 per edge")
    edges = []
    fresh = H3.n
    for e, mult in zip(H3.edges, nu):
        for _ in range(mult):
            fresh += 1
            for a, b in combinations(e, 2):
                edges.append((a, b, fresh))
    return validate(edges, fresh, 3)


# -- rooted blow-up ---------------------------------------------------------

def gen_rooted_blowup(sizes: Sequence[int], k: int) -> Hypergraph:
    """All k-subsets of ``V_i ∪ V_j`` containing both roots, for every pair i < j.

    Part ``i`` occupies consecutive vertices; its first vertex is the root.
    """
    sizes = list(sizes)
    if k < 2 or not sizes or any(s < 1 for s in sizes):
        raise BadParameters("need k >= 2 and part sizes >= 1")
    if not any(a + b >= k for a, b in combinations(sizes, 2)):
        raise BadParameters(f"no pair of parts has {k} vertices")
    parts = []
    nxt = 1
    for s in sizes:
        parts.append(list(range(nxt, nxt + s)))
        nxt += s
    edges = []
    for i, j in combinations(range(len(parts)), 2):
        ri, rj = parts[i][0], parts[j][0]
        others = parts[i][1:] + parts[j][1:]
        for extra in combinations(others, k - 2):
            edges.append(tuple(sorted((ri, rj) + extra)))
    return validate(edges, nxt - 1, k)


# -- lattices ---------------------------------------------------------------

def _subdivide_graph(G: nx.Graph) -> Hypergraph:
    """Triples ``u w_e v``: lattice vertices first (sorted), then one midpoint per edge."""
    label, G = _relabel(G)
    n = len(label)
    edges = []
    for u, v in sorted(tuple(sorted(e)) for e in G.edges()):
        n += 1
        edges.append((u, v, n))
    return validate(edges, n, 3)


def gen_hex_3graph(rows: int, cols: int) -> Hypergraph:
    """Subdivided hexagonal lattice patch of ``rows`` x ``cols`` hexagons."""
    if rows < 1 or cols < 1:
        raise BadParameters("rows and cols must be >= 1")
    return _subdivide_graph(nx.hexagonal_lattice_graph(rows, cols))


def gen_heilmann_lattice(rows: int, cols: int) -> Hypergraph:
    """Decorated square lattice patch with ``rows`` x ``cols`` cells.

    Every square-lattice edge, and a half-edge stub beyond each boundary
    vertex, carries a decoration vertex. Each branching vertex is the middle
    of two collinear triples: (left, v, right) and (below, v, above).
    """
    if rows < 1 or cols < 1:
        raise BadParameters("rows and cols must be >= 1")
    ids: dict = {}

    def vid(key) -> int:
        if key not in ids:
            ids[key] = len(ids) + 1
        return ids[key]

    for y in range(rows + 1):
        for x in range(cols + 1):
            vid(("site", x, y))
    edges = []
    for y in range(rows + 1):
        for x in range(cols + 1):
            v = vid(("site", x, y))
            # horizontal decorations sit at x +- 1/2, vertical at y +- 1/2
            edges.append((vid(("h", x, y)), v, vid(("h", x + 1, y))))
            edges.append((vid(("v", x, y)), v, vid(("v", x, y + 1))))
    return validate(edges, len(ids), 3)


# -- hardness reduction -----------------------------------------------------

def reduce_graph_to_kgraph(G: nx.Graph, k: int) -> Hypergraph:
    """Pad every graph edge ``uv`` with ``k-2`` private vertices.

    Graph vertices become 1..|V| in sorted order; the padding vertices of the
    i-th edge (edges sorted) follow in blocks of ``k-2``. Matchings of the
    result correspond one-to-one with matchings of ``G``.
    """
    if k < 3:
        raise BadParameters(f"the reduction targets k >= 3, got {k}")
    if any(u == v for u, v in G.edges()):
        raise BadParameters("graph has a self-loop")
    label, G = _relabel(G)
    n = len(label)
    edges = []
    for u, v in sorted(tuple(sorted(e)) for e in G.edges()):
        pad = list(range(n + 1, n + k - 1))
        n += k - 2
        edges.append((u, *pad, v))
    return validate(edges, n, k)


# -- named families ---------------------------------------------------------

FAMILIES = (
    "overlap-cycle",
    "tight-cycle",
    "enriched-cycle",
    "random",
    "triangle",
    "subdivided",
    "blowup",
    "hex",
    "heilmann",
    "reduce",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """A family name plus the parameters its constructor needs."""

    family: str
    params: dict = field(default_factory=dict)

    def build(self, source: Hypergraph | None = None) -> Hypergraph:
        p = self.params
        fam = self.family
        try:
            if fam == "overlap-cycle":
                return gen_overlap_cycle(p["n"], p["k"], p["ell"])
            if fam == "tight-cycle":
                return gen_tight_cycle(p["n"], p["k"])
            if fam == "enriched-cycle":
                return gen_enriched_tight_cycle(p["n"], p["k"])
            if fam == "random":
                return gen_random_kgraph(p["n"], p["k"], p["p"], p.get("seed"))
            if fam == "triangle":
                if source is not None:
                    return gen_triangle_3graph(graph_from_hypergraph(source))
                return gen_triangle_3graph_random(p["n"], p["p"], p.get("seed"))
            if fam == "subdivided":
                if source is None:
                    raise BadParameters("subdivided needs an input 3-graph")
                return gen_subdivided(source, p.get("nu", 1))
            if fam == "blowup":
                return gen_rooted_blowup(p["sizes"], p["k"])
            if fam == "hex":
                return gen_hex_3graph(p["rows"], p["cols"])
            if fam == "heilmann":
                return gen_heilmann_lattice(p["rows"], p["cols"])
            if fam == "reduce":
                if source is None:
                    raise BadParameters("reduce needs an input graph")
                return reduce_graph_to_kgraph(graph_from_hypergraph(source), p["k"])
        except KeyError as exc:
            raise BadParameters(f"family {fam!r} needs parameter {exc.args[0]!r}") from None
        raise BadParameters(f"unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
