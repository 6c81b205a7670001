"""Exceptions raised by the engine.

Every error carries the exit code the command line reports for it:
2 for unreadable input, 3 for a violated precondition, 4 for a failed
property check and 1 for an internal inconsistency.
"""


class EngineError(Exception):
    """Base class for all errors raised on purpose by the engine."""

    exit_code = 3


class DocumentError(EngineError):
    """An input document could not be parsed or failed its checks."""

    exit_code = 2


class PreconditionError(EngineError, ValueError):
    """An operation was called outside its domain."""

    exit_code = 3


class ShapeMismatch(PreconditionError):
    pass


class ArityMismatch(PreconditionError):
    pass


class ValuationZero(PreconditionError):
    pass


class ValuationZeroArgument(ValuationZero):
    pass


class ConstantTermNotOne(PreconditionError):
    pass


class EmptyWord(PreconditionError):
    pass


class SingleLetter(PreconditionError):
    pass


class NotLyndonWord(PreconditionError):
    pass


class DegreeExceedsTruncation(PreconditionError):
    pass


class DegreeOutOfRange(PreconditionError):
    pass


class NotLieElement(PreconditionError):
    pass


class NotGroupLike(PreconditionError):
    pass


class TruncationTooSmall(PreconditionError):
    pass


class JacobiViolation(PreconditionError):
    pass


class NotNilpotent(PreconditionError):
    pass


class SingularEquation(PreconditionError):
    pass


class NonRationalScalar(PreconditionError):
    pass


class InvalidDecomposition(PreconditionError):
    pass


class PropertyFailure(EngineError):
    """A verification suite found a counterexample."""

    exit_code = 4


class EngineBug(EngineError):
    """An identity the engine relies on did not hold."""

    exit_code = 1


class NonConvergence(EngineBug):
    pass


class ReconstructionMismatch(EngineBug):
    pass
