# ==============================================================================
# ERROR CODES
# ==============================================================================
# Every failure raised by the library is a HypStretchError carrying one of the
# codes below. validate() never raises, it collects violations instead.
# ==============================================================================

from enum import Enum
from typing import Any, Dict


class ErrorCode(str, Enum):
    INTERSECTING_GEODESICS = "INTERSECTING_GEODESICS"
    NO_INTERSECTION = "NO_INTERSECTION"
    INVALID_SHEARS = "INVALID_SHEARS"
    INVALID_POINT = "INVALID_POINT"
    NO_CENTER = "NO_CENTER"
    OUT_OF_PIECE = "OUT_OF_PIECE"
    HEXAGON_UNSUPPORTED = "HEXAGON_UNSUPPORTED"
    UNROLL_LIMIT = "UNROLL_LIMIT"
    NOT_IN_SUPPORT = "NOT_IN_SUPPORT"
    MISSING_BRANCH_WEIGHT = "MISSING_BRANCH_WEIGHT"
    NOT_GENERIC = "NOT_GENERIC"
    UNSPLITTABLE = "UNSPLITTABLE"
    NEGATIVE_MEASURE = "NEGATIVE_MEASURE"
    PATH_BROKEN = "PATH_BROKEN"
    PARABOLIC_OR_TRIVIAL = "PARABOLIC_OR_TRIVIAL"
    GEODESICS_INTERSECT = "GEODESICS_INTERSECT"
    NOT_A_CROWN = "NOT_A_CROWN"
    SWITCH_VIOLATION = "SWITCH_VIOLATION"
    NON_TRIANGLE_PIECE = "NON_TRIANGLE_PIECE"
    DEGENERATE_ISOMETRY = "DEGENERATE_ISOMETRY"
    INVALID_SURFACE = "INVALID_SURFACE"
    COMBINATORIAL_MISMATCH = "COMBINATORIAL_MISMATCH"
    BAD_FILE = "BAD_FILE"


class HypStretchError(Exception):
    """Library error with a machine-readable code."""

    def __init__(self, code: ErrorCode, message: str = "", **context: Any):
        self.code = ErrorCode(code)
        self.message = message or self.code.value
        self.context: Dict[str, Any] = context
        super().__init__(f"{self.code.value}: {self.message}")

    def to_dict(self) -> Dict[str, Any]:
        data = {"code": self.code.value, "message": self.message}
        if self.context:
            data["context"] = {k: str(v) for k, v in self.context.items()}
        return data
