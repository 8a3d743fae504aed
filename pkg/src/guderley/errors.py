"""Exception hierarchy.  The CLI maps each family to an exit code."""


class GuderleyError(Exception):
    exit_code = 1


class DomainError(GuderleyError, ValueError):
    """Input outside the admissible parameter or phase-plane domain."""

    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class RegionError(DomainError):
    """Phase point not in the region required by the jump map."""


class PoleError(DomainError):
    """Evaluation at V = -1 where f1 has a pole."""


class ConvergenceError(GuderleyError):
    exit_code = 3


class BracketError(ConvergenceError):
    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = profile or []


class SingularityError(ConvergenceError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class BudgetError(ConvergenceError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class MatchingError(ConvergenceError):
    pass


class TheoryViolation(GuderleyError):
    """A property proved for the exact solution failed numerically."""

    exit_code = 4


class AnnotationError(GuderleyError):
    pass


class PhysicalityError(TheoryViolation):
    pass


class DegeneracyError(ConvergenceError):
    pass
