class BecError(Exception):
    """Base class for errors raised on purpose by bectc"""


class DomainError(BecError, ValueError):
    """An argument lies outside the domain of the operation"""


class ShapeMismatchError(DomainError):
    """Trap shape and anisotropy parameter are inconsistent"""


class ConvergenceError(BecError, RuntimeError):
    """A series or root finder did not reach its tolerance"""


class BracketError(ConvergenceError):
    """A root could not be enclosed in a bracket"""


class SweepError(BecError):
    """One grid point of a sweep failed"""

    def __init__(self, command: str, index: int, point: str, cause: Exception):
        self.command = command
        self.index = index
        self.point = point
        self.cause = cause
        super().__init__(f"{command}: grid point {index} ({point}) failed: {cause}")


class ConfigError(BecError):
    """Invalid configuration, option combination or input file"""
