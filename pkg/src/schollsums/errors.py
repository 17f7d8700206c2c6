"""Exception vocabulary shared by all modules.

The split mirrors how callers are expected to react: DomainError means the
inputs were outside an operation's contract, CapacityError means the inputs
were legal but exceed a configured resource bound, ConsistencyError means an
internal mathematical identity failed (a bug or bad data, never recoverable),
PrecisionError means a floating-point fast path could not certify its result
and the caller may retry with an exact method.
"""


class DomainError(ValueError):
    """Input violates an operation's precondition."""


class CapacityError(RuntimeError):
    """Input is legal but exceeds a configured size/resource cap."""


class ConsistencyError(RuntimeError):
    """A mathematical invariant that must hold failed to hold."""


class PrecisionError(RuntimeError):
    """A floating-point pipeline could not certify exact rounding."""


class AmbiguityError(RuntimeError):
    """More than one candidate survived all available constraints."""
