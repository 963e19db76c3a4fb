"""Exception hierarchy.

The CLI maps :class:`InputError` to exit code 1 and the other two to exit
code 2.
"""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad index, wrong shape, ...)."""


class NumericError(ArithmeticError):
    """A numerical routine failed (non-convergence, invalid probabilities)."""


class CapabilityError(RuntimeError):
    """The request exceeds a documented size cap of an exact algorithm."""
