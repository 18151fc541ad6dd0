"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input document or in-memory value violates its invariants."""


class TopologyError(ValidationError):
    """The machine model (or its file representation) is invalid."""


class InfeasiblePlanError(ValueError):
    """The requested plan cannot be represented at page granularity."""
