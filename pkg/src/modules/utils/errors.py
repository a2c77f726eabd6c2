"""
Error hierarchy for the rational Half-Wave Maps toolkit
src/modules/utils/errors.py

Numerical precondition failures subclass ValueError as well, so callers that
catch ValueError around configuration and data loading keep working.
"""

from typing import Optional, Any


class HWMError(Exception):
    """Base class for every error raised by the toolkit."""


class NonTraceless(HWMError, ValueError):
    """A 2x2 matrix expected to be traceless has |Tr M| above tolerance."""


class NotNull(HWMError, ValueError):
    """A spin vector expected to be null has |s·s| above tolerance."""


class DegeneratePoles(HWMError, ValueError):
    """Two poles coincide, or a pole sits on (or too close to) the real axis."""


class NotProportional(HWMError, ValueError):
    """B_j A_j is not proportional to A_j, so the velocity b_j is undefined."""


class OrthogonalSpins(HWMError, ValueError):
    """s_j·s_k vanishes off-diagonal; the Matsuno sign at (j, k) is undefined."""

    def __init__(self, message: str, pairs: Optional[list] = None):
        super().__init__(message)
        self.pairs = pairs or []


class ResolventSingular(HWMError, ArithmeticError):
    """The resolvent (X0 + tL0 - xI)^-1 does not exist at the requested point."""


class NonRealField(HWMError, ArithmeticError):
    """The reconstructed field m(t, x) has imaginary parts above tolerance."""


class DefectiveMatrix(HWMError, ArithmeticError):
    """X0 + tL0 has an ill-conditioned eigenbasis (pole collision)."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class PoleCollision(HWMError, ArithmeticError):
    """Two poles came closer than the separation guard during integration."""


class BoundaryApproach(HWMError, ArithmeticError):
    """A pole reached the real axis during integration."""


class BoundaryApproachWarning(UserWarning):
    """A pole of a snapshot is within the boundary margin of the real axis."""


class SchemaError(HWMError, ValueError):
    """A datum file does not match the expected layout."""

    def __init__(self, message: str, field_path: str = ""):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


class ValidationFailed(HWMError, ValueError):
    """A datum was loaded but does not satisfy the solution constraints."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report
