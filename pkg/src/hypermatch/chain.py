"""The lazy Markov chain on matchings and its exact analysis.

One step from a matching ``M``: with probability 1/2 hold; otherwise draw an
edge ``h`` uniformly and let ``S_h`` be the edges of ``M`` meeting ``h``.
Remove ``h`` if it is in ``M``, add it if ``S_h`` is empty, swap it for the
single member of ``S_h``, and do nothing if ``|S_h| >= 2``. Every non-loop
transition therefore has probability ``1/(2|H|)``.
"""
from __future__ import annotations

import enum
import json
import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse

from .core import Hypergraph, as_matching, require_comb_free
from .errors import EmptyEdgeSet, InvariantViolation, StateSpaceTooLarge

CONDUCTANCE_CAP = 24
_BLOCK = 16384
DEFAULT_STATE_CAP = 2000


class TransitionKind(enum.Enum):
    REMOVE = "-"
    ADD = "+"
    SWAP = "+/-"
    NULL = "0"
    LAZY = "lazy"


def apply_edge(H: Hypergraph, M: frozenset[int], h: int) -> tuple[frozenset[int], TransitionKind]:
    """The proposal made when edge ``h`` is drawn in state ``M``."""
    if h in M:
        return M - {h}, TransitionKind.REMOVE
    mask = H.masks[h]
    hits = [i for i in M if H.masks[i] & mask]
    if not hits:
        return M | {h}, TransitionKind.ADD
    if len(hits) == 1:
        return (M - {hits[0]}) | {h}, TransitionKind.SWAP
    return M, TransitionKind.NULL


def step(
    H: Hypergraph, M: Iterable[int], rng: np.random.Generator
) -> tuple[frozenset[int], TransitionKind]:
    """Advance the chain by one step from ``M``."""
    if H.m == 0:
        raise EmptyEdgeSet("the chain needs at least one edge")
    M = frozenset(M)
    if rng.random() < 0.5:
        return M, TransitionKind.LAZY
    return apply_edge(H, M, int(rng.integers(H.m)))


def transition_probability(
    H: Hypergraph, M: Iterable[int], M2: Iterable[int]
) -> Fraction:
    """Exact one-step probability of moving from ``M`` to ``M2``."""
    M = as_matching(H, M)
    M2 = as_matching(H, M2)
    if M != M2:
        return Fraction(1, 2 * H.m) if _adjacent(H, M, M2) else Fraction(0)
    if H.m == 0:
        return Fraction(1)
    leaving = sum(1 for h in range(H.m) if apply_edge(H, M, h)[0] != M)
    return 1 - Fraction(leaving, 2 * H.m)


def _adjacent(H: Hypergraph, M: frozenset[int], M2: frozenset[int]) -> bool:
    diff = M ^ M2
    if len(diff) == 1:
        return True
    if len(diff) == 2:
        e, f = diff
        return bool(H.masks[e] & H.masks[f])
    return False


# -- exact transition matrix ------------------------------------------------

@dataclass(frozen=True)
class TransitionMatrix:
    """Exact transition matrix over all matchings.

    ``weights[i, j] / denominator`` is the probability of moving from
    ``states[i]`` to ``states[j]``; ``denominator`` is ``2|H|`` (2 when ``H``
    has no edges).
    """

    states: tuple[frozenset[int], ...]
    weights: np.ndarray
    denominator: int
    index: dict[frozenset[int], int] = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def prob(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.weights[i, j]), self.denominator)

    def as_float(self) -> np.ndarray:
        return self.weights / self.denominator

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.weights, self.weights.T))

    def is_stochastic(self) -> bool:
        return bool(np.all(self.weights.sum(axis=1) == self.denominator))

    def is_doubly_stochastic(self) -> bool:
        return self.is_stochastic() and bool(
            np.all(self.weights.sum(axis=0) == self.denominator)
        )

    def min_diagonal(self) -> Fraction:
        return Fraction(int(np.diag(self.weights).min()), self.denominator)

    def p_min(self) -> Fraction | None:
        off = self.weights.copy()
        np.fill_diagonal(off, 0)
        nz = off[off > 0]
        return Fraction(int(nz.min()), self.denominator) if nz.size else None

    def neighbors(self, i: int) -> list[int]:
        row = self.weights[i]
        return [int(j) for j in np.flatnonzero(row) if j != i]

    def is_irreducible(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in self.neighbors(i):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.size

    def is_aperiodic(self) -> bool:
        return bool(np.all(np.diag(self.weights) > 0))

    def uniform_is_stationary(self) -> bool:
        """Exact check that ``u P = u`` for the uniform row vector ``u``."""
        return bool(np.all(self.weights.sum(axis=0) == self.denominator))

    def dumps(self) -> str:
        """Text dump with exact ``p/q`` entries, stable across runs."""
        rows = []
        for i in range(self.size):
            rows.append([_ratio(int(w), self.denominator) for w in self.weights[i]])
        doc = {
            "states": [sorted(s) for s in self.states],
            "probabilities": rows,
        }
        return json.dumps(doc, indent=1) + "\n"


def _ratio(num: int, den: int) -> str:
    f = Fraction(num, den)
    return f"{f.numerator}/{f.denominator}"


def build_transition_matrix(
    H: Hypergraph, state_cap: int = DEFAULT_STATE_CAP
) -> TransitionMatrix:
    from .counting import enumerate_matchings
    from .errors import CapExceeded

    try:
        states = tuple(enumerate_matchings(H, cap=state_cap))
    except CapExceeded as exc:
        raise StateSpaceTooLarge(exc.reached, state_cap) from exc
    index = {s: i for i, s in enumerate(states)}
    N = len(states)
    denom = 2 * max(H.m, 1)
    W = np.zeros((N, N), dtype=np.int64)
    for i, M in enumerate(states):
        for h in range(H.m):
            M2, _ = apply_edge(H, M, h)
            if M2 != M:
                W[i, index[M2]] += 1
        W[i, i] = denom - W[i].sum()
    return TransitionMatrix(states, W, denom, index)


# -- analysis ---------------------------------------------------------------

def conductance(T: TransitionMatrix, cap: int = CONDUCTANCE_CAP) -> Fraction:
    """Exact conductance by enumerating every cut with ``0 < |S| <= N/2``.

    A one-state chain has no admissible cut; its conductance is reported as 1.
    """
    N = T.size
    if N == 1:
        return Fraction(1)
    if N > cap:
        raise StateSpaceTooLarge(N, cap)
    off = T.weights.astype(np.int32)
    np.fill_diagonal(off, 0)
    deg = off.sum(axis=0)
    # cut[S] and |S| for all subsets S, grown one state at a time:
    # adding v to S adds deg(v) and removes twice the weight between v and S.
    cut = np.zeros(1, dtype=np.int32)
    pop = np.zeros(1, dtype=np.int8)
    for v in range(N):
        inner = np.zeros(1, dtype=np.int32)
        for u in range(v):
            inner = np.concatenate([inner, inner + off[u, v]])
        cut = np.concatenate([cut, cut + deg[v] - 2 * inner])
        pop = np.concatenate([pop, pop + 1])
    best: Fraction | None = None
    for s in range(1, N // 2 + 1):
        value = Fraction(int(cut[pop == s].min()), s * T.denominator)
        if best is None or value < best:
            best = value
    return best


@dataclass
class ChainAnalysis:
    n_states: int
    conductance: Fraction | None
    spectral_gap: float
    tv_curve: list[tuple[int, float]]
    t_mix_exact: int | None
    epsilon: float
    envelope_checked: bool

    def envelope(self, t: int) -> float | None:
        """The bound ``|Ω|² (1 - Φ²/2)^t`` on the distance after ``t`` steps."""
        if self.conductance is None:
            return None
        phi = float(self.conductance)
        return self.n_states**2 * (1.0 - phi * phi / 2.0) ** t

    def csv_rows(self) -> list[tuple[int, float, float | None]]:
        return [(t, d, self.envelope(t)) for t, d in self.tv_curve]

    def summary(self) -> dict:
        return {
            "states": self.n_states,
            "conductance": None if self.conductance is None else str(self.conductance),
            "conductance_float": None if self.conductance is None else float(self.conductance),
            "spectral_gap": self.spectral_gap,
            "epsilon": self.epsilon,
            "t_mix_exact": self.t_mix_exact,
            "t_max": self.tv_curve[-1][0] if self.tv_curve else 0,
            "envelope_checked": self.envelope_checked,
        }


def spectral_gap(T: TransitionMatrix) -> float:
    if T.size == 1:
        return 1.0
    eig = np.linalg.eigvalsh(T.as_float())
    return float(1.0 - eig[-2])


def _exact_tv_sums(T: TransitionMatrix, t_max: int):
    """Yield ``(t, S_t)`` with ``d_TV(P_t, uniform) = S_t / (2 N D^t)``.

    ``P_t`` starts from the point mass on the empty matching; ``D`` is the
    matrix denominator. Integer arithmetic only.
    """
    N = T.size
    D = T.denominator
    diag = [int(T.weights[i, i]) for i in range(N)]
    nbrs = [T.neighbors(i) for i in range(N)]
    # every off-diagonal weight is 1
    assert all(int(T.weights[i, j]) == 1 for i in range(N) for j in nbrs[i])
    v = [0] * N
    v[0] = 1
    scale = 1
    for t in range(t_max + 1):
        yield t, sum(abs(N * x - scale) for x in v)
        v = [diag[i] * v[i] + sum(v[j] for j in nbrs[i]) for i in range(N)]
        scale *= D


def _envelope_holds(S: int, N: int, scale: int, t: int, phi: Fraction) -> bool:
    """Exact test of ``S/(2 N scale) <= N² (1 - phi²/2)^t``."""
    if S == 0:
        return True
    ratio = 1 - phi * phi / 2
    if ratio == 0:
        return t == 0 and S <= 2 * N**3 * scale
    lhs = math.log(S) - math.log(2 * N) - math.log(scale)
    rhs = 2 * math.log(N) + t * math.log(ratio.numerator / ratio.denominator)
    if lhs < rhs - 1e-6:
        return True
    if lhs > rhs + 1e-6:
        return False
    num, den = ratio.numerator, ratio.denominator
    return S * den**t <= 2 * N**3 * scale * num**t


def analyze(
    T: TransitionMatrix,
    epsilon: float = 0.25,
    t_max: int = 1000,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    conductance_cap: int = CONDUCTANCE_CAP,
) -> ChainAnalysis:
    """Exact mixing analysis of the chain started at the empty matching.

    For at most ``conductance_cap`` states the conductance is found by cut
    enumeration, the distance curve is computed in exact integer arithmetic
    and every point is checked against ``|Ω|² (1 - Φ²/2)^t``; an
    InvariantViolation is raised on any breach. Larger chains (up to
    ``state_cap``) get the spectral gap and a floating-point distance curve.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    N = T.size
    if N > state_cap:
        raise StateSpaceTooLarge(N, state_cap)
    gap = spectral_gap(T)
    curve: list[tuple[int, float]] = []
    t_mix = None

    if N <= conductance_cap:
        phi = conductance(T, conductance_cap)
        D = T.denominator
        eps = Fraction(epsilon)
        scale = 1
        for t, S in _exact_tv_sums(T, t_max):
            if t_mix is None and S * eps.denominator <= eps.numerator * 2 * N * scale:
                t_mix = t
            if not _envelope_holds(S, N, scale, t, phi):
                raise InvariantViolation(
                    f"d_TV at t={t} exceeds |Ω|²(1-Φ²/2)^t with Φ={phi}"
                )
            curve.append((t, S / (2 * N * scale)))
            scale *= D
        return ChainAnalysis(N, phi, gap, curve, t_mix, epsilon, True)

    P = scipy.sparse.csr_matrix(T.as_float())
    v = np.zeros(N)
    v[0] = 1.0
    for t in range(t_max + 1):
        d = 0.5 * float(np.abs(v - 1.0 / N).sum())
        curve.append((t, d))
        if t_mix is None and d <= epsilon:
            t_mix = t
        v = P.T @ v
    return ChainAnalysis(N, None, gap, curve, t_mix, epsilon, False)


def log_omega_upper_bound(H: Hypergraph) -> float:
    """An upper bound on ``ln |Ω(H)|`` computable without enumeration."""
    m, n, k = H.m, H.n, H.k
    bound = m * math.log(2)
    size = n / k  # largest possible matching size
    if 0 < size <= m:
        bound = min(bound, size * math.log(math.e * m / size))
    return bound


def theoretical_mixing_bound(H: Hypergraph, epsilon: float) -> int:
    """Steps guaranteed to bring the chain within ``epsilon`` of uniform.

    Uses ``t <= (2/Φ²)(2 ln|Ω| + ln 1/ε)`` with ``Φ >= 1/(4 n^k |H|)``
    and the enumeration-free bound on ``ln |Ω|``.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    require_comb_free(H)
    if H.m == 0:
        return 0
    inv_phi = 4 * H.n**H.k * H.m
    value = 2 * inv_phi**2 * (2 * log_omega_upper_bound(H) + math.log(1 / epsilon))
    return math.ceil(value)


def exact_mixing_bound(n_states: int, phi: Fraction, epsilon: float) -> float:
    """The same bound evaluated with an exactly known conductance."""
    p = float(phi)
    return 2 / (p * p) * (2 * math.log(n_states) + math.log(1 / epsilon))


# -- vectorised simulation --------------------------------------------------

def _bit_tables(H: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    words = (H.m + 63) // 64
    bit = np.zeros((H.m, words), dtype=np.uint64)
    nb = np.zeros((H.m, words), dtype=np.uint64)
    for h in range(H.m):
        bit[h, h // 64] = np.uint64(1) << np.uint64(h % 64)
        for j in H.neighbors[h]:
            nb[h, j // 64] |= np.uint64(1) << np.uint64(j % 64)
    return bit, nb


def run_chains(
    H: Hypergraph,
    batch: int,
    steps: int,
    rng: np.random.Generator,
    start: np.ndarray | None = None,
) -> np.ndarray:
    """Run ``batch`` independent copies of the chain for ``steps`` steps.

    States are edge bitmasks packed into uint64 words, shape
    ``(batch, ceil(m/64))``; all copies start from ``start`` (default: the
    empty matching).
    """
    words = max((H.m + 63) // 64, 1)
    if start is None:
        state = np.zeros((batch, words), dtype=np.uint64)
    else:
        state = np.array(start, dtype=np.uint64).reshape(batch, words)
    if H.m == 0 or steps == 0:
        return state
    bit, nb = _bit_tables(H)
    two_m = 2 * H.m
    dtype = np.int32 if two_m < 2**31 else np.int64
    # For a drawn edge h, conflict = M & nb[h] are the members of M meeting h.
    # h in M forces conflict = 0. Remove, Add and Swap all amount to
    # M ^= conflict ^ bit[h], applied iff the coin says move and
    # |conflict| <= 1; otherwise the state is held.
    # blocks of chains small enough to stay in cache
    for lo in range(0, batch, _BLOCK):
        block = state[lo:lo + _BLOCK]
        size = len(block)
        if words == 1:
            flat = block[:, 0].copy()
            nb1 = nb[:, 0]
            one = np.uint64(1)
            for _ in range(steps):
                draw = rng.integers(0, two_m, size=size, dtype=dtype)
                h = draw >> 1
                conflict = flat & nb1[h]
                accept = ((draw & 1) == 1) & (np.bitwise_count(conflict) <= 1)
                flat ^= (conflict ^ (one << h.astype(np.uint64))) * accept
            block[:, 0] = flat
            continue
        for _ in range(steps):
            draw = rng.integers(0, two_m, size=size, dtype=dtype)
            h = draw >> 1
            conflict = block & nb[h]
            count = np.bitwise_count(conflict).sum(axis=1)
            accept = ((draw & 1) == 1) & (count <= 1)
            block ^= (conflict ^ bit[h]) * accept[:, None].astype(np.uint64)
    return state


def contains_edge(states: np.ndarray, edge: int) -> np.ndarray:
    """Boolean vector: does each packed state contain ``edge``?"""
    word = states[:, edge // 64]
    return ((word >> np.uint64(edge % 64)) & np.uint64(1)).astype(bool)


def unpack_states(states: np.ndarray) -> list[frozenset[int]]:
    out = []
    for row in states:
        value = 0
        for w, word in enumerate(row):
            value |= int(word) << (64 * w)
        members = []
        while value:
            low = value & -value
            members.append(low.bit_length() - 1)
            value ^= low
        out.append(frozenset(members))
    return out


def pack_state(M: Iterable[int], m: int) -> np.ndarray:
    words = max((m + 63) // 64, 1)
    row = np.zeros(words, dtype=np.uint64)
    for i in M:
        row[i // 64] |= np.uint64(1) << np.uint64(i % 64)
    return row
