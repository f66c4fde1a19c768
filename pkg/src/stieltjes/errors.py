"""Exception types shared across the package."""


class StieltjesError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(StieltjesError):
    """Invalid argument, e.g. mismatched domains or a malformed seminorm."""


class ExistenceError(StieltjesError):
    """A requested integral does not exist.

    Raised when the integrand and the integrator share a discontinuity
    point, in which case no refinement strategy can converge.  The offending
    points are reported in the message.
    """


class EnumerationLimitError(StieltjesError):
    """An exact enumeration would exceed the configured size cap."""


class SchemaError(StieltjesError):
    """A problem file failed validation against the published schema."""

    def __init__(self, message, location=""):
        super().__init__(message)
        self.location = location
