"""Exception hierarchy shared by every kout module."""

from __future__ import annotations


class KoutError(Exception):
    """Base class for all errors raised by the package."""


# graph construction and I/O
class GraphError(KoutError):
    pass


class BadVertex(GraphError):
    def __init__(self, v, n: int) -> None:
        super().__init__(f"vertex {v!r} out of range for graph on {n} vertices")
        self.vertex = v
        self.n = n


class OddOrder(GraphError):
    pass


class InfeasibleDegree(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


# sampling
class SamplingError(KoutError):
    pass


class DegreeTooSmall(SamplingError):
    def __init__(self, vertex: int, degree: int, needed: int) -> None:
        super().__init__(
            f"vertex {vertex} has degree {degree} but {needed} distinct choices were requested"
        )
        self.vertex = vertex
        self.degree = degree
        self.needed = needed


class BadMultiplicity(SamplingError):
    pass


class BudgetExhausted(SamplingError):
    def __init__(self, vertex: int, color: int) -> None:
        super().__init__(f"vertex {vertex} has no draws left in color {color}")
        self.vertex = vertex
        self.color = color


# analysis
class TooLargeForExhaustive(KoutError):
    pass


class TooLarge(KoutError):
    pass


class RetriesExhausted(KoutError):
    def __init__(self, retries: int, best_failures: int) -> None:
        super().__init__(
            f"no valid cover after {retries} attempts; best attempt left {best_failures} pairs short"
        )
        self.retries = retries
        self.best_failures = best_failures


class BadPivot(KoutError):
    pass


class BadId(KoutError):
    pass


class MissingLineage(KoutError):
    pass


class InvariantViolation(KoutError):
    """A checked runtime invariant did not hold."""


# harness
class ConfigError(KoutError):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
