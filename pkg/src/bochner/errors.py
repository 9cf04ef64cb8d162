"""Exception taxonomy shared by all modules.

Structural errors are shape/kind mismatches (wrong space, wrong dimension,
mismatched grids).  Domain errors are bad argument values (non-positive
tolerances, negative weights, points outside the space).  The remaining
classes mark the documented failure modes of the limit-based extension.
"""


class BochnerError(Exception):
    """Base class for all library errors."""


class StructuralError(BochnerError, ValueError):
    """Operands of incompatible kind, dimension, space, or grid."""


class DomainError(BochnerError, ValueError):
    """Argument value outside the operation's domain."""


class NotElementaryError(BochnerError, RuntimeError):
    """The approximating family failed the uniform-integrability probe.

    Carries the probe report on the ``report`` attribute.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotConvergingError(BochnerError, RuntimeError):
    """The scheme does not converge in measure to the target evaluator."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


class ResolutionError(BochnerError, RuntimeError):
    """Horizon or depth exhausted before the requested criterion was met."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


class ScenarioError(BochnerError, ValueError):
    """Scenario parse or configuration error with field/position context."""

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
