"""Exception hierarchy.

ValidationError and its subclasses map to CLI exit code 2, everything
else that escapes maps to exit code 1.
"""


class LayerscopeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LayerscopeError):
    """Caller-supplied values violate a documented precondition."""


class DimensionError(ValidationError):
    """Array shape or size does not match what the operation requires."""


class UndefinedCorrelationError(ValidationError):
    """Correlation requested on a zero-variance input."""


class ConvergenceError(LayerscopeError):
    """An iterative solver failed to converge within its budget."""


class WeightFormatError(LayerscopeError):
    """A weight or fixture container could not be decoded.

    ``code`` is a stable machine-readable tag: one of ``bad_magic``,
    ``bad_header``, ``truncated``, ``shape_mismatch``, ``non_finite``.
    """

    code = "bad_header"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class BadMagicError(WeightFormatError):
    code = "bad_magic"


class TruncatedFileError(WeightFormatError):
    code = "truncated"


class SpecMismatchError(WeightFormatError):
    code = "shape_mismatch"


class NonFiniteValueError(WeightFormatError):
    code = "non_finite"
