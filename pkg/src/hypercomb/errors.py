"""Exception types shared across the package."""


class HypercombError(Exception):
    """Base class for package errors."""


class GraphStructureError(HypercombError):
    """The graph data violates a Serre-graph invariant."""


class GraphFormatError(HypercombError):
    """A graph file is malformed; carries the offending line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class GeodesicCapError(HypercombError):
    """A geodesic enumeration would exceed the configured cap."""

    def __init__(self, count, cap):
        super().__init__(f"{count} geodesics exceed the cap of {cap}")
        self.count = count
        self.cap = cap


class SizeCapError(HypercombError):
    """A generated ball would exceed the configured vertex cap."""


class TrustRadiusError(HypercombError):
    """A vertex lies outside the truncation-faithful region."""


class BudgetExceededError(HypercombError):
    """An exhaustive scan would exceed its work budget; use sampled mode."""


class PreconditionError(HypercombError):
    """An operation was called with arguments violating its precondition."""
