"""Exact counting, almost-uniform sampling and the ratio-ladder estimator."""
from __future__ import annotations

import enum
import math
import statistics
from dataclasses import asdict, dataclass, field

import numpy as np

from .chain import contains_edge, run_chains, theoretical_mixing_bound, unpack_states
from .core import Hypergraph, require_comb_free
from .errors import CapExceeded, ZeroRatio


def enumerate_matchings(H: Hypergraph, cap: int | None = None) -> list[frozenset[int]]:
    """All matchings of ``H`` (including the empty one).

    Ordered by size, then lexicographically on the sorted edge indices.
    Raises CapExceeded once more than ``cap`` matchings have been found.
    """
    masks = H.masks
    m = H.m
    found: list[frozenset[int]] = []
    chosen: list[int] = []

    def extend(i: int, used: int) -> None:
        if i == m:
            found.append(frozenset(chosen))
            if cap is not None and len(found) > cap:
                raise CapExceeded(len(found), cap)
            return
        extend(i + 1, used)
        if not masks[i] & used:
            chosen.append(i)
            extend(i + 1, used | masks[i])
            chosen.pop()

    _with_recursion_room(m, lambda: extend(0, 0))
    found.sort(key=lambda s: (len(s), sorted(s)))
    return found


def _with_recursion_room(depth: int, fn) -> None:
    import sys

    limit = sys.getrecursionlimit()
    if depth + 100 > limit:
        sys.setrecursionlimit(depth + 200)
    try:
        fn()
    finally:
        sys.setrecursionlimit(limit)


def count_exact(H: Hypergraph) -> int:
    """Exact number of matchings, without materialising them.

    Walks the same include/exclude decisions as :func:`enumerate_matchings`
    edge by edge, but merges branches whose occupied vertices agree on every
    vertex still used by a later edge.
    """
    masks = H.masks
    m = H.m
    later = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        later[i] = later[i + 1] | masks[i]
    frontier = {0: 1}
    for i in range(m):
        keep = later[i + 1]
        nxt: dict[int, int] = {}
        mask = masks[i]
        for used, ways in frontier.items():
            key = used & keep
            nxt[key] = nxt.get(key, 0) + ways
            if not used & mask:
                key = (used | mask) & keep
                nxt[key] = nxt.get(key, 0) + ways
        frontier = nxt
    return sum(frontier.values())


# -- sampling ---------------------------------------------------------------

class SamplingMode(enum.Enum):
    THEORETICAL_BOUND = "theoretical"
    EMPIRICAL_BURN_IN = "empirical"


def chain_length(
    H: Hypergraph,
    epsilon: float | None,
    mode: SamplingMode,
    burn_in: int | None = None,
) -> int:
    """Number of chain steps used to draw one sample."""
    mode = SamplingMode(mode)
    if mode is SamplingMode.THEORETICAL_BOUND:
        if epsilon is None:
            raise ValueError("theoretical mode needs epsilon")
        return theoretical_mixing_bound(H, epsilon)
    if burn_in is None or burn_in < 0:
        raise ValueError("empirical mode needs a non-negative burn_in")
    return int(burn_in)


def sample_matchings(
    H: Hypergraph,
    count: int,
    epsilon: float | None = None,
    mode: SamplingMode = SamplingMode.THEORETICAL_BOUND,
    burn_in: int | None = None,
    rng: np.random.Generator | int | None = None,
) -> list[frozenset[int]]:
    """Draw ``count`` independent samples, each from a fresh chain run at ∅."""
    steps = chain_length(H, epsilon, mode, burn_in)
    rng = np.random.default_rng(rng)
    return unpack_states(run_chains(H, count, steps, rng))


def sample_matching(
    H: Hypergraph,
    epsilon: float | None = None,
    mode: SamplingMode = SamplingMode.THEORETICAL_BOUND,
    burn_in: int | None = None,
    rng: np.random.Generator | int | None = None,
) -> frozenset[int]:
    """One almost-uniform matching.

    In theoretical mode the chain runs long enough for an ``epsilon``-uniform
    output on any 3-comb-free ``H``; in empirical mode it runs ``burn_in``
    steps with no guarantee.
    """
    return sample_matchings(H, 1, epsilon, mode, burn_in, rng)[0]


# -- estimator --------------------------------------------------------------

def ladder_sample_size(m: int, epsilon: float) -> int:
    return math.ceil(48 * m / epsilon**2)


def ladder_repetitions(delta: float) -> int:
    return math.ceil(12 * math.log(1 / delta))


@dataclass
class EstimateResult:
    estimate: float
    epsilon: float
    delta: float
    ratios: list[float]
    steps_per_sample: list[int]
    mode: str
    samples_per_level: int
    repetitions: int
    repetition_estimates: list[float] = field(default_factory=list)
    total_steps: int = 0
    seed: int | None = None
    retried_levels: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_count(
    H: Hypergraph,
    epsilon: float,
    delta: float,
    mode: SamplingMode = SamplingMode.EMPIRICAL_BURN_IN,
    burn_in: int | None = None,
    seed: int | None = None,
    *,
    samples_per_level: int | None = None,
    repetitions: int | None = None,
) -> EstimateResult:
    """Estimate the number of matchings of a 3-comb-free ``H``.

    With ``H_i`` the first ``i`` edges, ``|Ω(H)| = ∏ 1/r_i`` where ``r_i =
    |Ω(H_{i-1})| / |Ω(H_i)|`` is the share of matchings of ``H_i`` avoiding
    edge ``i``. Each ratio is the avoiding fraction among ``s`` samples of
    ``H_i`` drawn at per-sample accuracy ``epsilon / (8m)``; the product is
    formed ``R`` times and the lower median is returned.

    Level ``i`` draws from child ``i`` of ``SeedSequence(seed)``; a level
    whose ratio comes out 0 is redrawn once from that child's first spawn.
    """
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    mode = SamplingMode(mode)
    require_comb_free(H)
    m = H.m
    s = samples_per_level or ladder_sample_size(m, epsilon)
    R = repetitions or ladder_repetitions(delta)
    if m == 0:
        return EstimateResult(1.0, epsilon, delta, [], [], mode.value, s, R, [1.0], 0, seed)

    per_sample_eps = epsilon / (8 * m)
    children = np.random.SeedSequence(seed).spawn(m)
    ratios = np.empty((R, m))
    steps_used = []
    total = 0
    retried = []
    for level in range(1, m + 1):
        Hi = H.prefix(level)
        steps = chain_length(Hi, per_sample_eps, mode, burn_in)
        steps_used.append(steps)
        child = children[level - 1]
        r = _level_ratios(Hi, level - 1, s, R, steps, np.random.default_rng(child))
        total += s * R * steps
        if np.any(r == 0):
            retried.append(level)
            r = _level_ratios(
                Hi, level - 1, s, R, steps, np.random.default_rng(child.spawn(1)[0])
            )
            total += s * R * steps
            if np.any(r == 0):
                raise ZeroRatio(level)
        ratios[:, level - 1] = r

    per_rep = [float(1.0 / np.prod(row)) for row in ratios]
    chosen = per_rep.index(statistics.median_low(per_rep))
    return EstimateResult(
        estimate=per_rep[chosen],
        epsilon=epsilon,
        delta=delta,
        ratios=[float(x) for x in ratios[chosen]],
        steps_per_sample=steps_used,
        mode=mode.value,
        samples_per_level=s,
        repetitions=R,
        repetition_estimates=per_rep,
        total_steps=total,
        seed=seed,
        retried_levels=retried,
    )


_MAX_BATCH = 1 << 20


def _level_ratios(
    Hi: Hypergraph, edge: int, s: int, R: int, steps: int, rng: np.random.Generator
) -> np.ndarray:
    """Fraction of samples avoiding ``edge``, one value per repetition."""
    per_chunk = max(1, _MAX_BATCH // s)
    out = []
    for start in range(0, R, per_chunk):
        reps = min(per_chunk, R - start)
        states = run_chains(Hi, reps * s, steps, rng)
        avoid = ~contains_edge(states, edge)
        out.append(avoid.reshape(reps, s).mean(axis=1))
    return np.concatenate(out)


def exact_ladder_ratios(H: Hypergraph) -> list[tuple[int, int]]:
    """Exact ``(|Ω(H_{i-1})|, |Ω(H_i)|)`` for every level of the ladder."""
    counts = [count_exact(H.prefix(i)) for i in range(H.m + 1)]
    return [(counts[i - 1], counts[i]) for i in range(1, H.m + 1)]


def calibrate_burn_in(
    H_small: Hypergraph,
    target_m: int,
    epsilon: float,
    *,
    safety: float = 2.0,
    t_max: int = 10_000,
) -> int:
    """Burn-in for the estimator on a same-family instance with ``target_m`` edges.

    Finds the first ``t`` at which the exact distance from uniform of the
    chain on ``H_small``, started at ∅, drops to ``epsilon / (8 target_m)``,
    then scales it linearly in the edge count and by ``safety``.
    """
    from .chain import analyze, build_transition_matrix

    if H_small.m == 0:
        raise ValueError("calibration instance has no edges")
    res = analyze(build_transition_matrix(H_small), epsilon / (8 * target_m), t_max)
    if res.t_mix_exact is None:
        raise ValueError(f"chain did not mix within {t_max} steps")
    return max(1, math.ceil(safety * res.t_mix_exact * target_m / H_small.m))
