"""Exception hierarchy.

Everything raised on purpose by the library derives from :class:`SLSpecError`.
Numerical failures derive from :class:`NumericalError` so the CLI can map them
to its own exit code.
"""


class SLSpecError(Exception):
    """Base class for library errors."""


class ValidationError(SLSpecError, ValueError):
    """Malformed input (coefficients, trees, configs)."""


class OutOfDomain(ValidationError):
    pass


class ExpressionError(ValidationError):
    pass


class MismatchedStates(ValidationError):
    pass


class WindowOutOfDomain(ValidationError):
    pass


class NonRealSolution(ValidationError):
    pass


class BeyondTruncation(ValidationError):
    pass


class RealAxis(ValidationError):
    """m-function requested on the real axis."""


class NumericalError(SLSpecError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class ToleranceNotMet(NumericalError):
    pass


class TruncationUnstable(NumericalError):
    pass


class DegenerateNorm(NumericalError):
    pass


class RangeExceeded(NumericalError):
    pass


class NonpositiveH(NumericalError):
    pass


class HerglotzViolation(NumericalError):
    def __init__(self, offending):
        self.offending = list(offending)
        super().__init__(f"Im m <= -radius at z = {self.offending}")
