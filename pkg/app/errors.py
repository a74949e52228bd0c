"""Exception hierarchy for the IIPS toolkit."""

from enum import Enum
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from app.models.reports import MpResult


class IIPSError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(IIPSError, ValueError):
    """Operand shapes are incompatible for the requested operation."""


class SingularError(IIPSError, ArithmeticError):
    """A square matrix that had to be inverted is singular."""


class WeightDefect(str, Enum):
    """Why a matrix was rejected as a weight."""

    NOT_HERMITIAN = "NotHermitian"
    SINGULAR = "Singular"
    NOT_SQUARE = "NotSquare"


class WeightError(IIPSError, ValueError):
    """A candidate weight is not an invertible Hermitian matrix."""

    def __init__(self, defect: WeightDefect, field: Optional[str] = None):
        self.defect = defect
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{defect.value}")


class PreconditionUnmetError(IIPSError):
    """An identity or theorem was evaluated outside its hypotheses."""


class NotExistsError(PreconditionUnmetError):
    """The Moore-Penrose inverse does not exist for the given weights."""

    def __init__(self, message: str, result: Optional["MpResult"] = None):
        self.result = result
        super().__init__(message)


class InternalInconsistencyError(IIPSError, RuntimeError):
    """A verified result failed its own re-check. Always a bug."""


class ConfigError(IIPSError, ValueError):
    """Search configuration violates its invariants."""


class ParseError(IIPSError, ValueError):
    """Input JSON does not follow the exact matrix / weights format."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
