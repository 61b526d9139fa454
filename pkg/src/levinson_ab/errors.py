"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command-line front end:
1 for bad input, 2 for degenerate/tolerance conditions, 3 for numerical
non-convergence.
"""


class LevinsonError(Exception):
    exit_code = 1


class InputError(LevinsonError, ValueError):
    exit_code = 1


class PoleError(InputError):
    """Argument sits on a pole of Gamma or digamma."""


class DegenerateCase(LevinsonError):
    """A discriminating quantity sits within tolerance of a case boundary."""

    exit_code = 2


class KernelDimension(LevinsonError):
    exit_code = 2


class SingularBracket(LevinsonError):
    exit_code = 2


class CountMismatch(LevinsonError):
    exit_code = 3


class NonConvergence(LevinsonError):
    exit_code = 3


class IntegerDrift(LevinsonError):
    exit_code = 3


class BracketFailure(LevinsonError):
    exit_code = 3


class VortexOnPlaquette(LevinsonError):
    exit_code = 3


class RefinementNeeded(LevinsonError):
    """Raised by :func:`levinson_ab.special_fn.unwrap` when a raw phase step is too large.

    ``index`` holds the positions ``k`` such that the step from sample ``k`` to
    ``k + 1`` violated the threshold.
    """

    exit_code = 3

    def __init__(self, message, index=()):
        super().__init__(message)
        self.index = tuple(int(i) for i in index)
