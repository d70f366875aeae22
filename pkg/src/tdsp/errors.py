"""Exception hierarchy shared by the index, query and CLI layers."""


class TDSPError(Exception):
    """Base class for all package errors."""


class BreakpointBudgetExceeded(TDSPError):
    """A piecewise linear function grew past the configured breakpoint cap."""


class FIFOViolation(TDSPError):
    """A cost function has a segment with slope below -1."""


class GraphFormatError(TDSPError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DuplicateEdge(GraphFormatError):
    pass


class UnknownVertex(TDSPError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownEdge(TDSPError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class DisconnectedGraph(TDSPError):
    pass


class Unreachable(TDSPError):
    """No path exists between the query endpoints."""


class NotAncestor(TDSPError):
    pass


class CorruptProvenance(TDSPError):
    pass


class StaleSelection(TDSPError):
    """A shortcut selection was built for a different tree."""


class InfeasibleParameters(TDSPError, ValueError):
    pass
