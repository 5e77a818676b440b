"""Exception hierarchy for spinstat."""


class SpinStatError(Exception):
    """Base class for every error raised by spinstat."""


class NonUnitAxis(SpinStatError, ValueError):
    """A rotation axis or direction is not unit length."""


class DegenerateAntiparallel(SpinStatError, ValueError):
    """The bisector of two antiparallel directions is undefined."""


class DegenerateCollinear(SpinStatError, ValueError):
    """Two collinear directions do not fix a frame without a seed axis."""


class InvalidSpinProjection(SpinStatError, ValueError):
    """A projection m is out of range or has the wrong parity for its spin."""


class FrameMismatch(SpinStatError, ValueError):
    """Two particle descriptions were built from different frame pairs."""


class LabelMismatch(SpinStatError, ValueError):
    """Two pair states live in different mode spaces."""


class SpinMismatch(SpinStatError, ValueError):
    """An operation that needs equal spins received different ones."""


class TriangleViolation(SpinStatError, ValueError):
    """Angular momenta fail the triangle rule."""


class GridTooCoarse(SpinStatError, ValueError):
    """A quadrature grid cannot integrate the requested rank exactly."""


class NumericOverflow(SpinStatError, OverflowError):
    """An exact quantity does not fit in a float."""


class NotProportional(SpinStatError, ArithmeticError):
    """Two states that should differ by a phase are not proportional."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class OracleDisagreement(SpinStatError, ArithmeticError):
    """The algebraic and numeric exclusion checks disagree."""
