"""Exception types shared across the library.

The CLI reports per-record failures with the exception class name, so these
names are part of the external surface.
"""


class BregmanDecodingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BregmanDecodingError, ValueError):
    """Scalar argument lies outside the generator's domain."""


class UnsupportedGeneratorError(BregmanDecodingError, ValueError):
    """Operation is undefined for this generator kind (e.g. a limit kind)."""


class GeneratorError(BregmanDecodingError, ValueError):
    """Generator is invalid for the requested mode or code path."""


class InputError(BregmanDecodingError, ValueError):
    """Input vector violates an invariant (shape, range, or mass)."""


class TieError(BregmanDecodingError, ValueError):
    """The argmax is not unique where a unique maximizer is required."""


class BracketError(BregmanDecodingError, ValueError):
    """Root-finding bracket does not satisfy the sign condition."""


class ConvergenceError(BregmanDecodingError, RuntimeError):
    """Iteration budget exhausted before the tolerance was reached."""


class RangeError(BregmanDecodingError, ValueError):
    """Requested sparsity k lies outside [1, V]."""


class SizeError(BregmanDecodingError, ValueError):
    """Problem too large for a brute-force oracle."""


class MultipleCrossingsError(BregmanDecodingError, RuntimeError):
    """A grid scan observed more than one sign change where the solution
    should be unique."""
