"""Exception types shared across the package."""


class RtfLabError(Exception):
    pass


class ConfigError(RtfLabError):
    pass


class BudgetExceeded(RtfLabError):
    pass


class InversionOfZero(RtfLabError, ZeroDivisionError):
    pass


class PrecisionUnderflow(RtfLabError):
    pass


class UncertainValuation(RtfLabError):
    pass


class SingularElement(RtfLabError):
    pass


class SingularDelta(SingularElement):
    pass


class NonRegularX(RtfLabError):
    pass


class UnsupportedCharacter(RtfLabError):
    pass


class PointOnBoundary(RtfLabError):
    pass


class WindowTooSmall(RtfLabError):
    pass


class GridEmpty(RtfLabError):
    pass


class AxiomFailure(RtfLabError):
    def __init__(self, clause, message=""):
        super().__init__(f"axiom ({clause}) violated: {message}")
        self.clause = clause


class VerificationFailure(RtfLabError):
    pass
