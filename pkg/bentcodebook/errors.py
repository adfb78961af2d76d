"""
Error types for bentcodebook

Every failure the library reports carries an ErrorType so callers (and the
CLI) can turn it into a structured result dict instead of a bare traceback.
"""

import logging
from enum import Enum
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class ErrorType(str, Enum):
    INVALID_PARAMETER = "invalid_parameter"
    MODULUS_MISMATCH = "modulus_mismatch"
    NOT_A_PERMUTATION = "not_a_permutation"
    ARITY_MISMATCH = "arity_mismatch"
    LENGTH_MISMATCH = "length_mismatch"
    INDEX_OUT_OF_RANGE = "index_out_of_range"
    GUARD_EXCEEDED = "guard_exceeded"
    CONSISTENCY_VIOLATION = "consistency_violation"
    FOREIGN_CODEBOOK = "foreign_codebook"
    INVALID_SPEC = "invalid_spec"


# Exit status the CLI uses for each error type; anything not listed is a
# validation failure.
EXIT_CODES = {
    ErrorType.CONSISTENCY_VIOLATION: 1,
}
DEFAULT_EXIT_CODE = 2


class CodebookError(ValueError):
    """Base class for all library errors."""

    error_type: ErrorType = ErrorType.INVALID_PARAMETER

    def __init__(self, message: str, error_type: Optional[ErrorType] = None,
                 **details: Any):
        super().__init__(message)
        if error_type is not None:
            self.error_type = error_type
        self.message = message
        self.details: Dict[str, Any] = details

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.error_type, DEFAULT_EXIT_CODE)

    def to_dict(self) -> Dict[str, Any]:
        """Result-dict form used by the CLI for structured error output."""
        return {
            "ok": False,
            "error_type": self.error_type.value,
            "error": self.message,
            "details": {key: _jsonable(value) for key, value in self.details.items()},
        }


class ParameterError(CodebookError):
    error_type = ErrorType.INVALID_PARAMETER


class ModulusMismatchError(CodebookError):
    error_type = ErrorType.MODULUS_MISMATCH


class PermutationError(CodebookError):
    error_type = ErrorType.NOT_A_PERMUTATION


class GuardExceededError(CodebookError):
    error_type = ErrorType.GUARD_EXCEEDED


class ConsistencyError(CodebookError):
    """An internal invariant that theory guarantees did not hold."""

    error_type = ErrorType.CONSISTENCY_VIOLATION

    def __init__(self, message: str, **details: Any):
        super().__init__(message, **details)
        logger.error(f"Consistency violation: {message} {details}")


class ForeignCodebookError(CodebookError):
    error_type = ErrorType.FOREIGN_CODEBOOK


class SpecError(CodebookError):
    error_type = ErrorType.INVALID_SPEC


def require(condition: bool, message: str,
            error_type: ErrorType = ErrorType.INVALID_PARAMETER, **details: Any) -> None:
    """Raise a CodebookError of the given type unless condition holds."""
    if not condition:
        raise CodebookError(message, error_type=error_type, **details)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)
