"""Canonical paths between matchings and the injective encoding of congestion.

For matchings ``I`` and ``F`` of a 3-comb-free hypergraph every component of
``I ⊕ F`` is an alternating path or an even cycle. The canonical path from
``I`` to ``F`` unwinds these components one at a time, in order of their
smallest vertex, using only Add, Remove and Swap moves of the chain.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .chain import TransitionKind, transition_probability
from .core import (
    Component,
    ComponentDecomposition,
    ComponentKind,
    Hypergraph,
    Owner,
    _trace_components,
    as_matching,
    decompose,
    is_matching,
    min_vertex,
    require_comb_free,
)
from .errors import CapExceeded, DegreeViolation, StateSpaceTooLarge, TransitionNotOnPath


@dataclass(frozen=True)
class CanonicalPath:
    matchings: tuple[frozenset[int], ...]
    venues: tuple[int, ...]
    kinds: tuple[TransitionKind, ...]
    decomposition: ComponentDecomposition

    @property
    def length(self) -> int:
        return len(self.venues)

    def transitions(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        return list(zip(self.matchings, self.matchings[1:]))

    def position(self, M: frozenset[int], M2: frozenset[int]) -> int | None:
        for j, pair in enumerate(self.transitions()):
            if pair == (M, M2):
                return j
        return None

    def step_log(self, H: Hypergraph | None = None) -> str:
        lines = []
        for j, ((a, b), kind, r) in enumerate(zip(self.transitions(), self.kinds, self.venues)):
            added = sorted(b - a)
            removed = sorted(a - b)
            desc = f"+{added}" if added else ""
            desc += f" -{removed}" if removed else ""
            if H is not None:
                desc += "  " + " ".join(
                    ("+" if i in added else "-") + str(list(H.edges[i])) for i in added + removed
                )
            lines.append(f"{j:3d} {kind.value:>4} Q{r + 1}: {desc.strip()}")
        return "\n".join(lines)


def _intersection_min(H: Hypergraph, a: int, b: int) -> int:
    return min_vertex(H.masks[a] & H.masks[b])


def orient(H: Hypergraph, comp: Component) -> tuple[int, ...]:
    """Traversal order ``e_1, ..., e_s`` used by the canonical path."""
    order = comp.edges
    s = len(order)
    if comp.kind is ComponentKind.EVEN_PATH:
        return order if comp.owners[0] is Owner.F else order[::-1]
    if comp.kind is ComponentKind.ODD_PATH:
        if s == 1:
            return order
        head = _intersection_min(H, order[0], order[1])
        tail = _intersection_min(H, order[-2], order[-1])
        return order if head < tail else order[::-1]
    # cycle: e_1 is the I-edge holding the smallest vertex covered by I-edges
    i_edges = [e for e, o in zip(order, comp.owners) if o is Owner.I]
    lo = min_vertex(H.covered(i_edges))
    start = next(pos for pos, e in enumerate(order) if e in i_edges and H.masks[e] >> lo & 1)
    forward = order[start:] + order[:start]
    backward = (forward[0],) + forward[:0:-1]
    for cand in (forward, backward):
        if _intersection_min(H, cand[1], cand[2]) > _intersection_min(H, cand[-2], cand[-1]):
            return cand
    raise AssertionError("cycle orientation is always decidable")


def _moves(comp: Component, seq: tuple[int, ...]) -> list[tuple[list[int], list[int], TransitionKind]]:
    """(added, removed, kind) for each transition across one component."""
    s = len(seq)
    pairs = lambda lo, hi: [([seq[j]], [seq[j + 1]], TransitionKind.SWAP) for j in range(lo, hi, 2)]
    if comp.kind is ComponentKind.EVEN_PATH:
        return pairs(0, s)
    if comp.kind is ComponentKind.CYCLE:
        return (
            [([], [seq[0]], TransitionKind.REMOVE)]
            + pairs(1, s - 1)
            + [([seq[-1]], [], TransitionKind.ADD)]
        )
    if comp.owners[0] is Owner.I:
        return [([], [seq[0]], TransitionKind.REMOVE)] + pairs(1, s)
    return pairs(0, s - 1) + [([seq[-1]], [], TransitionKind.ADD)]


def _canonical_path(H: Hypergraph, I: frozenset[int], F: frozenset[int]) -> CanonicalPath:
    dec = decompose(H, I, F)
    current = I
    matchings = [current]
    venues = []
    kinds = []
    for r, comp in enumerate(dec):
        for added, removed, kind in _moves(comp, orient(H, comp)):
            current = current.difference(removed).union(added)
            matchings.append(current)
            venues.append(r)
            kinds.append(kind)
    return CanonicalPath(tuple(matchings), tuple(venues), tuple(kinds), dec)


def canonical_path(H: Hypergraph, I: Iterable[int], F: Iterable[int]) -> CanonicalPath:
    """The canonical path from matching ``I`` to matching ``F``."""
    require_comb_free(H)
    return _canonical_path(H, as_matching(H, I), as_matching(H, F))


def check_path_properties(
    H: Hypergraph, I: frozenset[int], F: frozenset[int], path: CanonicalPath
) -> list[str]:
    """Violations of the four structural properties of a canonical path."""
    problems = []
    ms = path.matchings
    if ms[0] != I or ms[-1] != F:
        problems.append("(a) endpoints differ from (I, F)")
    for j, (a, b) in enumerate(path.transitions()):
        if transition_probability(H, a, b) <= 0:
            problems.append(f"(b) step {j} is not a chain transition")
    lo, hi = I & F, I | F
    for j, M in enumerate(ms):
        if not (lo <= M <= hi):
            problems.append(f"(c) M_{j} leaves [I∩F, I∪F]")
    comps = path.decomposition.components
    for j, r in enumerate(path.venues):
        M = ms[j]
        diff = ms[j] ^ ms[j + 1]
        if not diff <= set(comps[r].edges):
            problems.append(f"venue of step {j} does not contain M_j ⊕ M_j+1")
        before = {e for c in comps[:r] for e in c.edges}
        after = {e for c in comps[r + 1:] for e in c.edges}
        if not (F & before) <= M or not (I & after) <= M:
            problems.append(f"(d) fails at step {j}")
    if path.length > len(I ^ F):
        problems.append("path longer than |I ⊕ F|")
    return problems


# -- encoding ---------------------------------------------------------------

def eta(
    H: Hypergraph,
    I: Iterable[int],
    F: Iterable[int],
    M: Iterable[int],
    M2: Iterable[int],
    path: CanonicalPath | None = None,
) -> frozenset[int]:
    """Encode ``(I, F)`` relative to the transition ``(M, M2)`` on its path."""
    I, F, M, M2 = (frozenset(x) for x in (I, F, M, M2))
    if path is None:
        path = canonical_path(H, I, F)
    if path.position(M, M2) is None:
        raise TransitionNotOnPath(f"({sorted(M)}, {sorted(M2)}) is not on γ(I, F)")
    return (I ^ F) ^ (M | M2)


def in_omega_prime(H: Hypergraph, edges: Iterable[int]) -> bool:
    """Is the edge set a matching, or a matching plus one extra edge?"""
    members = sorted(edges)
    masks = H.masks
    cover: set[int] | None = None
    for x, a in enumerate(members):
        for b in members[x + 1:]:
            if masks[a] & masks[b]:
                pair = {a, b}
                cover = pair if cover is None else cover & pair
                if not cover:
                    return False
    return True


def omega_prime(H: Hypergraph, matchings: Iterable[frozenset[int]]) -> set[frozenset[int]]:
    """Every matching together with every matching extended by one edge."""
    out: set[frozenset[int]] = set()
    for M in matchings:
        out.add(M)
        for e in range(H.m):
            out.add(M | {e})
    return out


def decode(
    H: Hypergraph, M: Iterable[int], M2: Iterable[int], img: Iterable[int]
) -> tuple[frozenset[int], frozenset[int]] | None:
    """Recover ``(I, F)`` from a transition and its encoding.

    Returns ``None`` when ``img`` is not the encoding of any pair whose
    canonical path uses ``(M, M2)``.
    """
    M, M2, img = frozenset(M), frozenset(M2), frozenset(img)
    diff = img ^ (M | M2)
    common = M - diff
    moved = M ^ M2
    if not moved or not moved <= diff:
        return None
    try:
        pieces = _trace_components(H, diff)
    except DegreeViolation:
        return None
    venue = [r for r, (order, _) in enumerate(pieces) if moved & set(order)]
    if len(venue) != 1:
        return None
    (r,) = venue

    I_part: set[int] = set()
    F_part: set[int] = set()
    for idx, (order, is_cycle) in enumerate(pieces):
        here = set(order)
        if idx < r:
            F_part |= here & M
            I_part |= here - M
        elif idx > r:
            I_part |= here & M
            F_part |= here - M
        else:
            removed = M - M2
            if removed:
                (anchor,) = removed
                anchor_side = Owner.I
            else:
                (anchor,) = M2 - M
                anchor_side = Owner.F
            if is_cycle and len(order) % 2:
                return None
            parity = order.index(anchor) % 2
            for pos, e in enumerate(order):
                same = pos % 2 == parity
                if (anchor_side is Owner.I) == same:
                    I_part.add(e)
                else:
                    F_part.add(e)
    I = frozenset(common | I_part)
    F = frozenset(common | F_part)
    if not is_matching(H, I) or not is_matching(H, F):
        return None
    try:
        path = _canonical_path(H, I, F)
    except DegreeViolation:
        return None
    if path.position(M, M2) is None or (I ^ F) ^ (M | M2) != img:
        return None
    return I, F


# -- congestion -------------------------------------------------------------

@dataclass(frozen=True)
class TransitionRow:
    source: frozenset[int]
    target: frozenset[int]
    paths: int
    omega_prime: int

    @property
    def certificate(self) -> bool:
        return self.paths <= self.omega_prime

    @property
    def label(self) -> str:
        return f"{sorted(self.source)}->{sorted(self.target)}".replace(", ", " ")


@dataclass(frozen=True)
class CutCheck:
    size: int
    cut: int
    bound: float
    holds: bool


@dataclass
class CongestionReport:
    n_states: int
    omega_prime: int
    n_power_k: int
    rows: list[TransitionRow]
    pairs_checked: int
    eta_outside_omega_prime: int
    decode_failures: int
    collisions: int
    property_violations: int
    cut_checks: list[CutCheck] = field(default_factory=list)

    @property
    def max_congestion(self) -> int:
        return max((row.paths for row in self.rows), default=0)

    @property
    def omega_prime_within_bound(self) -> bool:
        return self.omega_prime <= self.n_power_k * self.n_states

    @property
    def ok(self) -> bool:
        return (
            all(row.certificate for row in self.rows)
            and self.omega_prime_within_bound
            and self.eta_outside_omega_prime == 0
            and self.decode_failures == 0
            and self.collisions == 0
            and self.property_violations == 0
            and all(c.holds for c in self.cut_checks)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["transition", "paths", "omega_prime", "certificate"])
        for row in self.rows:
            writer.writerow([row.label, row.paths, row.omega_prime, str(row.certificate).lower()])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "states": self.n_states,
            "omega_prime": self.omega_prime,
            "n_power_k_times_states": self.n_power_k * self.n_states,
            "transitions": len(self.rows),
            "max_congestion": self.max_congestion,
            "pairs_checked": self.pairs_checked,
            "eta_outside_omega_prime": self.eta_outside_omega_prime,
            "decode_failures": self.decode_failures,
            "collisions": self.collisions,
            "property_violations": self.property_violations,
            "cut_checks": len(self.cut_checks),
            "cut_check_failures": sum(not c.holds for c in self.cut_checks),
            "ok": self.ok,
        }


def congestion_report(
    H: Hypergraph,
    state_cap: int = 500,
    *,
    cut_samples: int = 200,
    seed: int = 0,
    check_decode: bool = True,
    check_properties: bool = True,
) -> CongestionReport:
    """Route a canonical path between every ordered pair of matchings.

    Counts the paths through each directed transition, compares the count to
    the exact size of the encoding space, and checks that the encoding lands
    in that space and decodes back to the pair. Random cuts ``S`` are checked
    against ``|cut(S)| >= |S|(|Ω|-|S|) / (n^k |Ω|)``.
    """
    from .counting import enumerate_matchings

    require_comb_free(H)
    try:
        states = enumerate_matchings(H, cap=state_cap)
    except CapExceeded as exc:
        raise StateSpaceTooLarge(exc.reached, state_cap) from exc

    counts: dict[tuple[frozenset[int], frozenset[int]], int] = {}
    images: dict[tuple[frozenset[int], frozenset[int]], set[frozenset[int]]] = {}
    outside = decode_failures = violations = 0
    for I in states:
        for F in states:
            path = _canonical_path(H, I, F)
            if check_properties and check_path_properties(H, I, F, path):
                violations += 1
            diff = I ^ F
            for M, M2 in path.transitions():
                key = (M, M2)
                counts[key] = counts.get(key, 0) + 1
                img = diff ^ (M | M2)
                images.setdefault(key, set()).add(img)
                if not in_omega_prime(H, img):
                    outside += 1
                if check_decode and decode(H, M, M2, img) != (I, F):
                    decode_failures += 1
    collisions = sum(counts[key] - len(images[key]) for key in counts)

    size_prime = len(omega_prime(H, states))
    order = {s: i for i, s in enumerate(states)}
    rows = [
        TransitionRow(a, b, c, size_prime)
        for (a, b), c in sorted(counts.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]]))
    ]
    nk = H.n**H.k
    report = CongestionReport(
        n_states=len(states),
        omega_prime=size_prime,
        n_power_k=nk,
        rows=rows,
        pairs_checked=len(states) ** 2,
        eta_outside_omega_prime=outside,
        decode_failures=decode_failures,
        collisions=collisions,
        property_violations=violations,
    )
    report.cut_checks = _sample_cuts(H, states, nk, cut_samples, seed)
    return report


def _sample_cuts(
    H: Hypergraph, states: list[frozenset[int]], nk: int, samples: int, seed: int
) -> list[CutCheck]:
    N = len(states)
    if N < 2:
        return []
    index = {s: i for i, s in enumerate(states)}
    from .chain import apply_edge

    adj = [set() for _ in range(N)]
    for i, M in enumerate(states):
        for h in range(H.m):
            M2, _ = apply_edge(H, M, h)
            if M2 != M:
                adj[i].add(index[M2])
    rng = np.random.default_rng(seed)
    checks = []
    for _ in range(samples):
        size = int(rng.integers(1, N // 2 + 1))
        S = set(int(x) for x in rng.choice(N, size=size, replace=False))
        cut = sum(1 for i in S for j in adj[i] if j not in S)
        bound = size * (N - size) / (nk * N)
        checks.append(CutCheck(size, cut, bound, cut >= bound))
    return checks
