"""Exception hierarchy.

Configuration-type problems derive from :class:`ConfigError` (CLI exit 2);
numerical failures derive from :class:`NumericalError` (CLI exit 3).
"""


class SpecDiagError(Exception):
    pass


class ConfigError(SpecDiagError, ValueError):
    pass


class NumericalError(SpecDiagError, ArithmeticError):
    pass


class ParameterError(ConfigError):
    pass


class DomainError(ConfigError):
    pass


class AdmissibilityError(ParameterError):
    """(alpha, p) pair outside the Laguerre admissibility region."""


class MarginError(ConfigError):
    pass


class ResolutionError(ConfigError):
    pass


class PowerOverflowError(NumericalError, OverflowError):
    def __init__(self, index, log_magnitude):
        self.index = index
        self.log_magnitude = log_magnitude
        super().__init__(
            f"|e(λ)|^n |c(λ)| overflows at index {index} "
            f"(log magnitude {log_magnitude:.6g})"
        )


class SingularResolventError(NumericalError):
    def __init__(self, index, distance, floor):
        self.index = index
        self.distance = distance
        self.floor = floor
        super().__init__(
            f"resolvent is singular at index {index}: |e(λ) - z| = {distance:.3g} "
            f"below floor {floor:.3g}"
        )


class ZeroShiftError(NumericalError, ZeroDivisionError):
    pass


class QuadratureError(NumericalError):
    pass


class AccuracyError(NumericalError):
    def __init__(self, message, estimates=()):
        self.estimates = tuple(estimates)
        super().__init__(f"{message}; last estimates {self.estimates}")
