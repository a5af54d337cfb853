"""Exception hierarchy shared by all modules.

Every error is also a ``ValueError`` (or ``ArithmeticError`` for the
estimator) so generic callers can catch the builtin class.
"""


class CoherenceError(Exception):
    """Base class for errors raised by this package."""


class ArgumentError(CoherenceError, ValueError):
    """Invalid argument: wrong shape, mismatched dimensions, bad index."""


class ValidationError(ArgumentError):
    """An object violates one of its declared invariants.

    ``invariant`` names the violated property (e.g. ``"hermitian"``).
    """

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant


class CapacityError(ArgumentError):
    """Total Hilbert-space dimension exceeds the configured maximum."""


class InvalidChannelError(ArgumentError):
    """Kraus operators violate the completeness relation."""


class DegenerateBranchError(CoherenceError, ArithmeticError):
    """A measurement/postselection branch has (numerically) zero probability."""


class EstimatorUndefinedError(CoherenceError, ArithmeticError):
    """The DQC1 estimator divides by a vanishing coherence amplitude."""


class ParseError(ArgumentError):
    """Malformed input file; ``location`` pinpoints the line or field."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
