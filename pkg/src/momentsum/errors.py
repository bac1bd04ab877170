"""Exception hierarchy shared across the package.

Two families matter to callers: UsageError for bad input or exhausted
user-supplied limits, and InternalError for broken invariants that should be
unreachable on valid input. The CLI maps them to exit codes 2 and 3.
"""


class MomentSumError(Exception):
    """Base class for all package errors."""


class UsageError(MomentSumError):
    """Invalid input, unsupported parameters, or an exhausted budget."""


class ParseError(UsageError):
    """Malformed instance text or serialized value."""


class InputError(UsageError):
    """Structurally valid input rejected by an operation's preconditions."""


class BudgetExceededError(UsageError):
    """A search space larger than the caller's cap; carries the required size."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class InternalError(MomentSumError):
    """An invariant that valid inputs can never break did break."""


class ConstructionError(InternalError):
    """A reduction produced objects violating its own postconditions."""


class SoundnessViolationError(InternalError):
    """A verified subset that decodes to no valid assignment."""
