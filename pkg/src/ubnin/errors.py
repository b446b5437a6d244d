"""Exception types shared across the package."""


class UbninError(Exception):
    """Base class for package-specific errors."""


class ValidationError(UbninError):
    """Input data violates a structural contract (shape, symmetry, finiteness, format)."""


class MalformedCodeError(UbninError):
    """A serialized network code is non-canonical, out of bounds, or unparseable."""


class DegenerateDesignError(UbninError):
    """A statistical routine received data it cannot meaningfully analyze."""


class UndefinedMetricError(UbninError):
    """A graph metric is undefined for the given network, e.g. no reachable node pairs."""


class NotEstimableError(UbninError):
    """Small-world comparison failed because a random reference lacks a defined metric."""
