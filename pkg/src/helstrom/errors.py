"""Exception hierarchy shared across the package.

Every error raised deliberately by this package derives from
:class:`HelstromError`, so callers can catch one type at the boundary.
Generic misuse of function signatures (wrong types, nonsense parameter
combinations not tied to data) raises plain ``ValueError``.
"""

from __future__ import annotations

__all__ = [
    "HelstromError",
    "ZeroNormError",
    "NonFiniteError",
    "DimensionMismatchError",
    "DegeneratePairError",
    "SizeCapError",
    "NonIntegerKError",
    "EmptyClassError",
    "EigenFailureError",
    "TooFewSamplesError",
    "LengthMismatchError",
    "EmptyInputError",
    "InvalidGridError",
    "StatsMismatchError",
    "TooFewPointsError",
    "MissingLabelColumnError",
    "MoreThanTwoClassesError",
    "ParseError",
    "VerificationFailure",
]


class HelstromError(Exception):
    """Base class for all errors raised by this package."""


class ZeroNormError(HelstromError):
    """A feature vector with zero Euclidean norm cannot be encoded."""


class NonFiniteError(HelstromError):
    """A value that must be finite is NaN or infinite."""


class DimensionMismatchError(HelstromError):
    """Two objects that must share a dimension do not."""


class DegeneratePairError(HelstromError):
    """A training pair is too close to parallel to carry sign information."""


class SizeCapError(HelstromError):
    """A tensor-power request would exceed the configured size cap."""


class NonIntegerKError(HelstromError):
    """Tensor powers are only defined for positive integer copy counts."""


class EmptyClassError(HelstromError):
    """An operation needs at least one sample from each class."""


class EigenFailureError(HelstromError):
    """The symmetric eigendecomposition did not converge."""


class TooFewSamplesError(HelstromError):
    """Not enough samples to honour the requested fold or neighbour count."""


class LengthMismatchError(HelstromError):
    """Two sequences that must be equally long are not."""


class EmptyInputError(HelstromError):
    """An aggregate over an empty collection is undefined here."""


class InvalidGridError(HelstromError):
    """A sweep grid request is empty, unordered, or non-positive."""


class StatsMismatchError(HelstromError):
    """A point's attribute count disagrees with the fitted statistics."""


class TooFewPointsError(HelstromError):
    """A curve check needs more points than were provided."""


class MissingLabelColumnError(HelstromError):
    """The requested label column is absent from the file header."""


class MoreThanTwoClassesError(HelstromError):
    """The label column holds more than two values and no pair was chosen."""


class ParseError(HelstromError):
    """A cell could not be parsed; carries the data row and column name."""

    def __init__(self, row: int, column: str | None, message: str):
        self.row = row
        self.column = column
        where = f"row {row}" if column is None else f"row {row}, column {column!r}"
        super().__init__(f"{where}: {message}")


class VerificationFailure(HelstromError):
    """The numerical verification suite found a deviation above tolerance."""
