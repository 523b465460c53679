"""Exception types shared across the package.

All validation failures derive from ValueError so callers that do not care
about the distinction can catch the builtin; the CLI maps them to exit code 2
(vs. 1 for I/O failures).
"""


class InvalidParameterError(ValueError):
    """A parameter violates its documented precondition (bad epsilon, bounds, lag, ...)."""


class InvalidInputError(ValueError):
    """Input data is malformed or misaligned (empty series, length mismatch, bad CSV row)."""


class MechanismStateError(RuntimeError):
    """A publication mechanism was stepped past its horizon without a reset."""
