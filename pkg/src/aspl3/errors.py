"""Exception types raised across the package."""


class GraphError(ValueError):
    """Invalid graph structure (self-loop, duplicate edge, wrong degree, ...)."""


class FeasibilityError(GraphError):
    """No simple d-regular graph of order n exists for the requested (n, d)."""


class EdgeListParseError(GraphError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class DiameterMismatch(ValueError):
    """The diameter-3 identities were requested for a graph of another diameter."""

    def __init__(self, diameter):
        self.diameter = diameter
        super().__init__(f"graph has diameter {diameter}, expected 3")


class SaturatedGraphError(RuntimeError):
    """No valid switch was found within the resample cap."""


class TableSizeError(MemoryError):
    """Path tables for this order would exceed the configured memory cap."""


class InvariantViolation(AssertionError):
    """A runtime self-check (regularity, tracked objective, tables) failed."""
