"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration and admissibility
problems exit 2, contract violations detected mid-run exit 3, solver
failures exit 4.
"""


class Cat0FlowError(Exception):
    """Base class for all package errors."""


class ValidationError(Cat0FlowError):
    """A point, space, target, or config value fails its structural checks."""


class ConfigError(ValidationError):
    """Malformed run configuration; message names the offending field."""


class DomainError(Cat0FlowError):
    """Input outside the mathematical domain of an operation."""


class UsageError(Cat0FlowError):
    """An operation was called with inconsistent or missing arguments."""


class StepSizeError(Cat0FlowError):
    """Step size outside the admissible interval for the functional."""


class CapabilityError(Cat0FlowError):
    """Requested operation has no implementation for this space/functional."""


class ContractError(Cat0FlowError):
    """A declared analytic contract (motion speed, convexity, ...) was violated."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class SolverError(Cat0FlowError):
    """Iteration failed to converge; carries the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RegionTooSmallError(Cat0FlowError):
    """Grid oracle minimum landed on the search-region boundary."""


class DataError(Cat0FlowError):
    """Structured data (fixtures, keyframes) is malformed or inconsistent."""
