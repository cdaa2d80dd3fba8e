"""Exception types shared across the library.

The CLI maps InputError to exit code 2 (invalid input) and
VerificationError to exit code 1 (violation).
"""


class InputError(ValueError):
    """Malformed or out-of-contract input data."""


class VerificationError(RuntimeError):
    """An identity or rank check that should hold failed."""
