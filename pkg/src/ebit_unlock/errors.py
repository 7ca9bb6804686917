"""Exception types raised by the library.

Every error message starts with a short fixed phrase (``"shape error"``,
``"not PSD"``, ...) so command-line diagnostics can be matched reliably.
"""


class EbitUnlockError(ValueError):
    """Base class for all library errors."""


class ShapeError(EbitUnlockError):
    pass


class DimensionOverflow(EbitUnlockError):
    pass


class NotHermitian(EbitUnlockError):
    pass


class NotPSD(EbitUnlockError):
    pass


class NotADistribution(EbitUnlockError):
    pass


class MulticopyTooLarge(EbitUnlockError):
    pass


class TwoQubitOnly(EbitUnlockError):
    pass


class UndefinedRate(EbitUnlockError):
    pass


class ValidationError(EbitUnlockError):
    """Raised by ensemble validation; ``problems`` lists every violated invariant."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InvariantViolation(EbitUnlockError):
    def __init__(self, violations):
        self.violations = list(violations)
        names = ", ".join(v.invariant for v in self.violations)
        super().__init__(f"invariant violated: {names}")
