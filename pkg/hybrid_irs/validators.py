"""
Validation utilities shared by the parameter and configuration layers.

Validators collect every problem they find instead of stopping at the
first one; callers decide whether to raise.
"""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

from .errors import (
    InvalidSweepAxis,
    NonFiniteValue,
    SimulatorError,
    UnknownKey,
)

logger = logging.getLogger(__name__)

SWEEP_AXES = ("budget", "rho", "rician_db", "p_irs_dbm", "cost_ratio", "n_elements")


@dataclass
class ValidationResult:
    """Result of input validation."""

    is_valid: bool
    errors: List[SimulatorError] = field(default_factory=list)

    @property
    def messages(self) -> List[str]:
        return [str(e) for e in self.errors]

    def raise_first(self):
        """Raise the first collected error, if any."""
        if self.errors:
            raise self.errors[0]


def require_finite(value: float, name: str) -> float:
    """
    Reject NaN and infinities.

    Args:
        value: Number to check
        name: Name used in the error message

    Returns:
        The value as a float
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise NonFiniteValue(f"{name} must be a number, got {value!r}")
    if not math.isfinite(number):
        raise NonFiniteValue(f"{name} must be finite, got {value!r}")
    return number


def validate_document_keys(
    document: Dict[str, Any], allowed: Iterable[str], section: str = "top level"
) -> ValidationResult:
    """
    Check that a configuration mapping only uses known keys.

    Args:
        document: Parsed mapping
        allowed: Accepted key names
        section: Section name for error messages

    Returns:
        ValidationResult with one UnknownKey per offending key
    """
    allowed_set = set(allowed)
    errors: List[SimulatorError] = [
        UnknownKey(key, section) for key in sorted(document) if key not in allowed_set
    ]
    if errors:
        logger.warning(f"Unknown keys in {section}: {[e.key for e in errors]}")
    return ValidationResult(is_valid=not errors, errors=errors)


def validate_sweep_axis(axis: str, values: List[Any]) -> ValidationResult:
    """
    Validate a sweep axis name and its value list.

    Args:
        axis: Axis name, one of SWEEP_AXES
        values: Axis values

    Returns:
        ValidationResult with validation status and any errors
    """
    errors: List[SimulatorError] = []

    if axis not in SWEEP_AXES:
        errors.append(
            InvalidSweepAxis(
                f"Sweep axis '{axis}' is not one of: {', '.join(SWEEP_AXES)}"
            )
        )

    if not isinstance(values, list) or not values:
        errors.append(InvalidSweepAxis("Sweep values must be a non-empty list"))
    elif axis == "rho" and any(
        isinstance(v, (int, float)) and not 0.0 <= v <= 1.0 for v in values
    ):
        errors.append(InvalidSweepAxis("rho values must lie in [0, 1]"))
    elif axis == "n_elements" and any(
        not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in values
    ):
        errors.append(InvalidSweepAxis("n_elements values must be non-negative integers"))

    is_valid = len(errors) == 0
    if is_valid:
        logger.info(f"Valid sweep axis '{axis}' with {len(values)} values")
    else:
        logger.warning(f"Sweep validation failed: {[str(e) for e in errors]}")
    return ValidationResult(is_valid=is_valid, errors=errors)


def create_validation_error_response(
    error: SimulatorError, errors: Optional[List[str]] = None
) -> Dict[str, Any]:
    """
    Create a standardized error payload.

    Args:
        error: The error that stopped the command
        errors: Additional error messages

    Returns:
        Error response dictionary
    """
    return {
        "success": False,
        "error_code": error.error_code,
        "message": str(error),
        "errors": errors if errors is not None else list(error.details),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def create_success_response(message: str, data: Dict[str, Any]) -> Dict[str, Any]:
    """Create a standardized success payload."""
    return {
        "success": True,
        "message": message,
        "data": data,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
