"""Exception hierarchy shared by every module of the package."""


class LHPPError(Exception):
    """Base class for all errors raised by :mod:`lhpp`."""


class DomainError(LHPPError, ValueError):
    """An argument lies outside the domain of the function."""


class BracketError(LHPPError, ValueError):
    """A root-finding bracket does not contain a sign change."""


class ParameterError(DomainError):
    """A parameter combination is jointly invalid (e.g. a non-PSD correlation)."""


class ApproximationError(LHPPError, ArithmeticError):
    """Inputs fall outside the validity range of a first-order approximation."""


class NumericalError(LHPPError, ArithmeticError):
    """A numerical procedure produced a non-finite or degenerate value."""


class InfeasibleError(LHPPError):
    """A structuring problem has no feasible solution."""


class ConfigError(LHPPError, ValueError):
    """A scenario configuration field is missing or invalid.

    Attributes:
        field: dotted name of the offending field, e.g. ``"pool.rho_bank"``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
