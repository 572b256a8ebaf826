"""Exception types raised across the package."""


class FracSFEError(Exception):
    """Base class for all package errors."""


class NonRealResult(FracSFEError):
    """Inverse transform produced a non-negligible imaginary part."""


class SupportOverflow(FracSFEError):
    """A field does not decay inside the box, so resampling would wrap."""


class NoZeroAtZeta(FracSFEError):
    """Truncation level is not a zero of f above the positivity point."""


class BadCaseClassification(FracSFEError):
    """The supplied xi0 is not an interior zero of f below zeta1."""


class ConditionF3Violated(FracSFEError):
    """The primitive never becomes positive on the scan interval."""


class IncompatibleGrid(FracSFEError):
    """Symmetry class does not fit the grid dimension."""


class BoxTooSmall(FracSFEError):
    """Requested construction does not fit inside the periodic box."""


class NoPositivePotential(FracSFEError):
    """The field has a nonpositive potential integral, so its dilation ray has no maximum."""


class NoBracket(FracSFEError):
    """The theta-derivative of J does not change sign on the bracket."""


class StepUnderflow(FracSFEError):
    """Backtracking drove the step below the floor."""


class NotConverged(FracSFEError):
    """Iteration budget exhausted; carries the best report so far."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FormatError(FracSFEError):
    """Field dump is malformed."""


class GridMismatch(FracSFEError):
    """Field dump does not match the configured grid."""


class ParseError(FracSFEError):
    def __init__(self, line, column, message):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class ValidationError(FracSFEError):
    """Configuration violates one or more named constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
