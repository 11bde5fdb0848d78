"""Approximate counting and almost-uniform sampling of matchings in
3-comb-free k-uniform hypergraphs."""
from __future__ import annotations

__version__ = "0.1.0"

from .chain import (
    ChainAnalysis,
    TransitionKind,
    TransitionMatrix,
    analyze,
    build_transition_matrix,
    step,
    theoretical_mixing_bound,
    transition_probability,
)
from .core import (
    ComponentDecomposition,
    ComponentKind,
    Hypergraph,
    IntersectionGraph,
    Owner,
    decompose,
    find_three_comb,
    intersection_graph,
    is_matching,
    load_hypergraph,
    parse_hypergraph,
    validate,
)
from .counting import (
    EstimateResult,
    SamplingMode,
    count_exact,
    enumerate_matchings,
    estimate_count,
    sample_matching,
    sample_matchings,
)
from .paths import CanonicalPath, canonical_path, congestion_report, decode, eta

__all__ = [name for name in dir() if not name.startswith("_")]
