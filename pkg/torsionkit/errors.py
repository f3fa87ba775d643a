# errors.py
"""Exception hierarchy shared by the services and the CLI."""


class TorsionKitError(Exception):
    """Base class for every error raised by torsionkit."""


class ShapeError(TorsionKitError, ValueError):
    pass


class NoSolutionError(TorsionKitError):
    """The right-hand side is not in the image of the matrix."""


class DependentBasisError(TorsionKitError, ValueError):
    pass


class ChainComplexError(TorsionKitError, ValueError):
    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


class InvalidChoicesError(TorsionKitError, ValueError):
    pass


class NotAcyclicError(TorsionKitError, ValueError):
    pass


class OversizeError(TorsionKitError, ValueError):
    pass


class SurfaceError(TorsionKitError, ValueError):
    pass


class DecompositionError(TorsionKitError, ValueError):
    pass


class OverdeterminedPatternError(TorsionKitError, ValueError):
    pass


class CalculatorError(TorsionKitError, ValueError):
    """Bad numeric input to a calculator or verifier (zero torsion, wrong pants count, no trials)."""


class DegenerateFormError(TorsionKitError):
    pass


class ExactnessError(TorsionKitError, RuntimeError):
    """A Mayer-Vietoris sequence failed its rank check; this is a construction bug."""
