"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition or invariant."""


class FormatError(ValueError):
    """A dataset file is malformed (ragged rows, bad header, unparseable)."""


class OracleUnavailableError(RuntimeError):
    """A sample has no ground-truth label, so only a human can answer."""


class SessionStateError(RuntimeError):
    """Operation not valid for the session's current status."""


class PoolExhaustedError(RuntimeError):
    """No unlabeled candidates remain to build a display from."""
