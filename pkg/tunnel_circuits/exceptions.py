"""Error types shared by every app; ``exit_code`` is what the management commands return."""


class TunnelCircuitError(ValueError):
    exit_code = 1


class DomainError(TunnelCircuitError):
    """A parameter lies outside its physical domain; the message names the rule."""

    exit_code = 2


class BracketError(TunnelCircuitError):
    exit_code = 2


class NoRootsError(TunnelCircuitError):
    exit_code = 3


class EvaluationError(TunnelCircuitError):
    """A determinant could not be evaluated to a finite number."""

    exit_code = 4

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class AiryRangeError(EvaluationError):
    def __init__(self, argument):
        super().__init__(f"Airy argument {argument!r} is outside the supported range", abscissa=argument)
        self.argument = argument


class ConvergenceError(EvaluationError):
    pass


class NotAModeError(TunnelCircuitError):
    """The boundary matrix is not singular enough to carry a non-trivial solution."""

    exit_code = 5
