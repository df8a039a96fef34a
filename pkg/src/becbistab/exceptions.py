"""Exception hierarchy shared by the solver modules."""


class BistabError(Exception):
    """Base class for all package errors."""


class ParameterError(BistabError, ValueError):
    """Invalid physical parameter or configuration value."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SingularFactorError(ParameterError):
    """The condensate steady-state factor 1 - gamma_sm/(4 omega_r) vanishes."""


class NumericalError(BistabError, ArithmeticError):
    """Base class for solver failures (CLI exit code 3)."""


class DegeneratePolynomialError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Iteration did not reach its tolerance; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)


class DivergenceError(NumericalError):
    """Non-finite state during time integration."""

    def __init__(self, message, last_time=None, last_state=None):
        self.last_time = last_time
        self.last_state = last_state
        super().__init__(message)


class StiffnessError(NumericalError):
    """Adaptive step size fell below the representable minimum."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate=None, error_bound=None):
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(message)
