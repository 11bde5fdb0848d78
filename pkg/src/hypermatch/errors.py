"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class HypermatchError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HypermatchError, ValueError):
    """Input does not describe a valid k-uniform hypergraph."""


class ParseError(ValidationError):
    """A hypergraph file could not be parsed."""


class WrongEdgeSize(ValidationError):
    pass


class VertexOutOfRange(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class DuplicateVertexInEdge(ValidationError):
    pass


class BadParameters(HypermatchError, ValueError):
    """Generator or routine parameters violate their preconditions."""


class PreconditionError(HypermatchError):
    """An operation was called on an input outside its domain."""


class IndexOutOfRange(PreconditionError, IndexError):
    pass


class NotAMatching(PreconditionError):
    pass


class EmptyEdgeSet(PreconditionError):
    pass


class NotCombFree(PreconditionError):
    """The hypergraph contains a 3-comb; ``witness`` holds its edge indices."""

    def __init__(self, witness: tuple[int, int, int, int]):
        self.witness = witness
        a, b, c, center = witness
        super().__init__(
            f"hypergraph contains a 3-comb: edges {a}, {b}, {c} are pairwise "
            f"disjoint and each meets edge {center}"
        )


class DegreeViolation(PreconditionError):
    """An edge of a symmetric difference meets three or more others."""

    def __init__(self, edge: int, neighbors: list[int]):
        self.edge = edge
        self.neighbors = neighbors
        super().__init__(
            f"edge {edge} meets {len(neighbors)} other edges of the symmetric "
            f"difference ({neighbors}); the hypergraph is not 3-comb-free"
        )


class TransitionNotOnPath(PreconditionError):
    pass


class ResourceLimit(HypermatchError):
    """A guard on problem size was hit."""


class StateSpaceTooLarge(ResourceLimit):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"state space has at least {size} matchings (cap {cap})")


class CapExceeded(ResourceLimit):
    def __init__(self, reached: int, cap: int):
        self.reached = reached
        self.cap = cap
        super().__init__(f"enumeration stopped after {reached} matchings (cap {cap})")


class InvariantViolation(HypermatchError, AssertionError):
    """A computed quantity contradicts a proven invariant."""


class ZeroRatio(HypermatchError):
    def __init__(self, level: int):
        self.level = level
        super().__init__(
            f"ratio at level {level} was estimated as 0 twice; increase the sample size"
        )
