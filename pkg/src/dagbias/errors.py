"""Exception types shared across the package."""


class DagbiasError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DagbiasError):
    """Raised when a diagram source text is rejected.

    Carries a 1-based line and column pointing at the offending token or
    statement.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class CyclicGraphError(DagbiasError):
    """Raised when an operation requires an acyclic graph but found a cycle.

    ``vertex`` names one vertex that lies on a directed cycle.
    """

    def __init__(self, vertex: str):
        super().__init__(f"graph contains a directed cycle through {vertex!r}")
        self.vertex = vertex


class NotExposureLoopFreeError(DagbiasError):
    """Raised when a directed path leaves and re-enters the exposure set.

    Minimality reasoning and adjustment-set enumeration are only valid on
    graphs without such loops; ``path`` names one violating path.
    """

    def __init__(self, path: list[str]):
        super().__init__(
            "directed path re-enters the exposure set: " + " -> ".join(path)
        )
        self.path = list(path)


class BudgetExceededError(DagbiasError):
    """Raised by brute-force reference routines when an input is too large."""
