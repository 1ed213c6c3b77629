"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class Mazur66Error(Exception):
    exit_code = 1


class ParameterDomainError(Mazur66Error, ValueError):
    exit_code = 3


class PreconditionError(Mazur66Error, ValueError):
    exit_code = 4


class DepthExhaustedError(Mazur66Error):
    """No admissible interval exists at the built depth; rebuild deeper."""

    exit_code = 5


class SearchExhaustedError(Mazur66Error):
    exit_code = 6


class ScheduleViolationError(Mazur66Error, ValueError):
    exit_code = 7


class MismatchError(Mazur66Error, ValueError):
    exit_code = 8


class StepGeometryError(Mazur66Error, ValueError):
    exit_code = 9


class WindowError(Mazur66Error, ValueError):
    exit_code = 10


class InstanceFileError(Mazur66Error, ValueError):
    exit_code = 11


class CertificationError(Mazur66Error, ArithmeticError):
    """Interval arithmetic could not separate a comparison within the precision cap."""

    exit_code = 12
