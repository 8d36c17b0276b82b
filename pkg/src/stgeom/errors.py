"""Exception hierarchy.  The CLI maps each family to its own exit code."""


class StGeomError(Exception):
    """Base class for all package errors."""


class ParseError(StGeomError, ValueError):
    """Malformed input text or structure file."""


class DimensionError(StGeomError, ValueError):
    """Mismatched or out-of-range dimensions and indices."""


class InvariantError(StGeomError, ValueError):
    """A mathematical invariant of the input fails."""


class NotPositiveDefinite(InvariantError):
    pass


class JacobiError(InvariantError):
    """Structure constants violate d^2 = 0."""


class PhiCompletionError(InvariantError):
    """A partial phi table cannot be completed consistently."""


class InvalidStructure(InvariantError):
    """Almost contact metric or Hermitian invariants fail."""


class PreconditionError(StGeomError, ValueError):
    """Operation called on input outside its domain (e.g. a non-ST structure)."""


class NotST(PreconditionError):
    pass


class InternalInconsistency(StGeomError, RuntimeError):
    """Two independent routes to the same quantity disagree: a convention bug."""
