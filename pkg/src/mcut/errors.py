class McutError(Exception):
    """Base class for library errors."""


class InputError(McutError, ValueError):
    """Malformed or invalid input (CLI exit code 2)."""


class VerificationError(McutError):
    """A verifier or proved bound failed (CLI exit code 1)."""


class InternalError(McutError, RuntimeError):
    """An invariant the algorithm guarantees was violated; indicates a bug."""
