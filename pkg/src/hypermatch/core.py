"""Hypergraphs, matchings, intersection graphs and 3-comb detection.

Vertices are the integers ``1..n``. An edge is identified by its position in
``Hypergraph.edges``; every downstream structure (matchings, canonical paths,
transition matrices) refers to edges by that index.
"""
from __future__ import annotations

import enum
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path

from .errors import (
    DegreeViolation,
    DuplicateEdge,
    DuplicateVertexInEdge,
    IndexOutOfRange,
    NotAMatching,
    NotCombFree,
    ParseError,
    ValidationError,
    VertexOutOfRange,
    WrongEdgeSize,
)

Matching = frozenset  # frozenset[int] of edge indices


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph on vertices ``1..n``.

    Construct through :func:`validate` (or the file loaders); the raw
    constructor trusts its input.
    """

    n: int
    k: int
    edges: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Vertex set of each edge as an integer bitmask (bit v for vertex v)."""
        out = []
        for e in self.edges:
            mask = 0
            for v in e:
                mask |= 1 << v
            out.append(mask)
        return tuple(out)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Intersection-graph adjacency: indices of edges meeting each edge."""
        by_vertex: dict[int, list[int]] = {}
        for i, e in enumerate(self.edges):
            for v in e:
                by_vertex.setdefault(v, []).append(i)
        out = []
        for i, e in enumerate(self.edges):
            nb = set()
            for v in e:
                nb.update(by_vertex[v])
            nb.discard(i)
            out.append(tuple(sorted(nb)))
        return tuple(out)

    def vertex_degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def covered(self, edge_indices: Iterable[int]) -> int:
        """Bitmask of vertices covered by the given edges."""
        mask = 0
        for i in edge_indices:
            mask |= self.masks[i]
        return mask

    def restrict(self, edge_indices: Iterable[int]) -> Hypergraph:
        """Sub-hypergraph keeping the listed edges in their original order."""
        keep = sorted(set(edge_indices))
        return Hypergraph(self.n, self.k, tuple(self.edges[i] for i in keep))

    def prefix(self, count: int) -> Hypergraph:
        """Sub-hypergraph made of the first ``count`` edges."""
        return Hypergraph(self.n, self.k, self.edges[:count])

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "edges": [list(e) for e in self.edges]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(", ", ": ")) + "\n"


def validate(raw_edges: Iterable[Iterable[int]], n: int, k: int) -> Hypergraph:
    """Check raw input and build a :class:`Hypergraph`.

    Raises one of WrongEdgeSize, VertexOutOfRange, DuplicateVertexInEdge or
    DuplicateEdge; nothing is silently repaired.
    """
    if not isinstance(k, int) or k < 2:
        raise ValidationError(f"uniformity k must be an integer >= 2, got {k!r}")
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"vertex count n must be a non-negative integer, got {n!r}")
    edges: list[tuple[int, ...]] = []
    seen: dict[tuple[int, ...], int] = {}
    for idx, raw in enumerate(raw_edges):
        verts = list(raw)
        for v in verts:
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"edge {idx}: vertex {v!r} is not an integer")
        if len(set(verts)) != len(verts):
            raise DuplicateVertexInEdge(f"edge {idx} repeats a vertex: {verts}")
        if len(verts) != k:
            raise WrongEdgeSize(f"edge {idx} has {len(verts)} vertices, expected {k}")
        for v in verts:
            if not 1 <= v <= n:
                raise VertexOutOfRange(f"edge {idx}: vertex {v} outside 1..{n}")
        key = tuple(sorted(verts))
        if key in seen:
            raise DuplicateEdge(f"edge {idx} duplicates edge {seen[key]}: {list(key)}")
        seen[key] = idx
        edges.append(key)
    return Hypergraph(n, k, tuple(edges))


# -- file formats -----------------------------------------------------------

def parse_hypergraph(text: str) -> Hypergraph:
    """Parse either the JSON document format or the line-oriented format.

    JSON: ``{"n": 5, "k": 3, "edges": [[1, 2, 3], [3, 4, 5]]}``.
    Lines: a header ``n k m`` followed by ``m`` lines of ``k`` vertex ids.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        missing = {"n", "k", "edges"} - set(doc)
        if missing:
            raise ParseError(f"missing fields: {sorted(missing)}")
        if not isinstance(doc["edges"], list) or not all(
            isinstance(e, list) for e in doc["edges"]
        ):
            raise ParseError("edges must be a list of vertex lists")
        return validate(doc["edges"], doc["n"], doc["k"])

    lines = [ln.split("#", 1)[0].strip() for ln in stripped.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty hypergraph file")
    try:
        header = [int(tok) for tok in lines[0].split()]
        rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"non-integer token: {exc}") from exc
    if len(header) != 3:
        raise ParseError(f"header must be 'n k m', got {lines[0]!r}")
    n, k, m = header
    if len(rows) != m:
        raise ParseError(f"header announces {m} edges, found {len(rows)}")
    return validate(rows, n, k)


def load_hypergraph(path: str | Path) -> Hypergraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_hypergraph(text)


def dump_hypergraph(H: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(H.dumps())


# -- intersection graph and 3-combs -----------------------------------------

@dataclass(frozen=True)
class IntersectionGraph:
    """Graph on edge indices; i ~ j iff edges i and j share a vertex."""

    adjacency: tuple[frozenset[int], ...]

    @property
    def order(self) -> int:
        return len(self.adjacency)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    def edge_list(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nb in enumerate(self.adjacency) for j in sorted(nb) if i < j]


def intersection_graph(H: Hypergraph) -> IntersectionGraph:
    return IntersectionGraph(tuple(frozenset(nb) for nb in H.neighbors))


def find_three_comb(H: Hypergraph) -> tuple[int, int, int, int] | None:
    """Return ``(i1, i2, i3, center)`` for a 3-comb of ``H`` or ``None``.

    Edges ``i1 < i2 < i3`` are pairwise disjoint and each meets ``center``.
    Candidates for the center are scanned in index order, so the witness is
    deterministic.
    """
    masks = H.masks
    for center, nb in enumerate(H.neighbors):
        if len(nb) < 3:
            continue
        for a_pos, a in enumerate(nb):
            ma = masks[a]
            rest = [b for b in nb[a_pos + 1:] if not masks[b] & ma]
            for b_pos, b in enumerate(rest):
                mab = ma | masks[b]
                for c in rest[b_pos + 1:]:
                    if not masks[c] & mab:
                        return (a, b, c, center)
    return None


def is_comb_free(H: Hypergraph) -> bool:
    return find_three_comb(H) is None


def require_comb_free(H: Hypergraph) -> None:
    witness = find_three_comb(H)
    if witness is not None:
        raise NotCombFree(witness)


# -- matchings --------------------------------------------------------------

def is_matching(H: Hypergraph, edge_indices: Iterable[int]) -> bool:
    seen = 0
    for i in edge_indices:
        if not 0 <= i < H.m:
            raise IndexOutOfRange(f"edge index {i} outside 0..{H.m - 1}")
        mask = H.masks[i]
        if seen & mask:
            return False
        seen |= mask
    return True


def as_matching(H: Hypergraph, edge_indices: Iterable[int]) -> frozenset[int]:
    """Freeze ``edge_indices`` after checking that they form a matching."""
    s = frozenset(edge_indices)
    if not is_matching(H, s):
        raise NotAMatching(f"edges {sorted(s)} are not pairwise disjoint")
    return s


def min_vertex(mask: int) -> int:
    """Smallest vertex in a non-empty vertex bitmask."""
    return (mask & -mask).bit_length() - 1


# -- symmetric difference decomposition -------------------------------------

class ComponentKind(enum.Enum):
    EVEN_PATH = "even-path"
    ODD_PATH = "odd-path"
    CYCLE = "cycle"


class Owner(enum.Enum):
    I = "I"  # noqa: E741
    F = "F"


@dataclass(frozen=True)
class Component:
    """One path or cycle of ``I ⊕ F`` with its edges in traversal order."""

    edges: tuple[int, ...]
    kind: ComponentKind
    owners: tuple[Owner, ...]
    min_vertex: int

    @property
    def size(self) -> int:
        return len(self.edges)

    def owner_of(self, edge: int) -> Owner:
        return self.owners[self.edges.index(edge)]


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple[Component, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, r: int) -> Component:
        return self.components[r]

    def component_of(self, edge: int) -> int:
        for r, comp in enumerate(self.components):
            if edge in comp.edges:
                return r
        raise KeyError(edge)


def _trace_components(
    H: Hypergraph, edge_set: Iterable[int]
) -> list[tuple[tuple[int, ...], bool]]:
    """Split ``edge_set`` into connected pieces of max intersection degree 2.

    Returns ``(edges in traversal order, is_cycle)`` per piece, sorted by the
    smallest covered vertex. Raises DegreeViolation when some edge meets three
    or more others of the set.
    """
    members = sorted(edge_set)
    masks = H.masks
    local_nb: dict[int, list[int]] = {i: [] for i in members}
    for a, b in combinations(members, 2):
        if masks[a] & masks[b]:
            local_nb[a].append(b)
            local_nb[b].append(a)
    for i in members:
        if len(local_nb[i]) > 2:
            raise DegreeViolation(i, local_nb[i])

    pieces = []
    seen: set[int] = set()
    for start in members:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in local_nb[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        ends = [i for i in comp if len(local_nb[i]) < 2]
        is_cycle = not ends
        if is_cycle:
            # start at the edge covering the component's minimum vertex and
            # step toward the neighbour with the smaller minimum vertex
            lo = min_vertex(H.covered(comp))
            first = next(i for i in sorted(comp) if masks[i] >> lo & 1)
            second = min(local_nb[first], key=lambda j: (min_vertex(masks[j]), j))
        else:
            first = min(ends, key=lambda j: (min_vertex(masks[j]), j))
            second = local_nb[first][0] if local_nb[first] else None
        order = [first]
        prev, cur = first, second
        while cur is not None and cur != first:
            order.append(cur)
            nxt = [y for y in local_nb[cur] if y != prev]
            prev, cur = cur, (nxt[0] if nxt else None)
        pieces.append((tuple(order), is_cycle))
    pieces.sort(key=lambda p: min_vertex(H.covered(p[0])))
    return pieces


def decompose(
    H: Hypergraph, I: Iterable[int], F: Iterable[int]
) -> ComponentDecomposition:
    """Decompose ``I ⊕ F`` into alternating paths and cycles.

    Components are ordered by their smallest covered vertex. Two edges that
    share several vertices form a path, never a cycle.
    """
    I = as_matching(H, I)
    F = as_matching(H, F)
    comps = []
    for order, is_cycle in _trace_components(H, I ^ F):
        owners = tuple(Owner.I if e in I else Owner.F for e in order)
        if is_cycle:
            kind = ComponentKind.CYCLE
        elif owners[0] == owners[-1]:
            kind = ComponentKind.ODD_PATH
        else:
            kind = ComponentKind.EVEN_PATH
        comps.append(Component(order, kind, owners, min_vertex(H.covered(order))))
    return ComponentDecomposition(tuple(comps))


def symmetric_difference_degrees_ok(H: Hypergraph, I: Iterable[int], F: Iterable[int]) -> bool:
    """True when every edge of ``I ⊕ F`` meets at most two others."""
    diff = sorted(frozenset(I) ^ frozenset(F))
    masks = H.masks
    for a in diff:
        if sum(1 for b in diff if b != a and masks[a] & masks[b]) > 2:
            return False
    return True


def disjoint_union(H1: Hypergraph, H2: Hypergraph) -> Hypergraph:
    """Place ``H2`` on fresh vertices after ``H1``; edges of ``H1`` come first."""
    if H1.k != H2.k:
        raise ValidationError("disjoint union needs equal uniformity")
    shifted = tuple(tuple(v + H1.n for v in e) for e in H2.edges)
    return Hypergraph(H1.n + H2.n, H1.k, H1.edges + shifted)


def edges_of(H: Hypergraph, edge_indices: Sequence[int]) -> list[tuple[int, ...]]:
    return [H.edges[i] for i in edge_indices]
