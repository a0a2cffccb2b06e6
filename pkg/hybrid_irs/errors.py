"""
Named errors raised by the simulator.

Every error carries a stable ``error_code`` so that the CLI can emit a
machine-parsable error line without inspecting message text.
"""

from typing import List, Optional


class SimulatorError(Exception):
    """Base class for all simulator errors."""

    error_code = "SIMULATOR_ERROR"

    def __init__(self, message: str, details: Optional[List[str]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or []


# Parameter invariants


class ParameterError(SimulatorError, ValueError):
    error_code = "INVALID_PARAMETER"


class NonFiniteValue(ParameterError):
    error_code = "NON_FINITE_VALUE"


class NonPositiveValue(ParameterError):
    error_code = "NON_POSITIVE_VALUE"


class AlphaMinBelowOne(ParameterError):
    error_code = "ALPHA_MIN_BELOW_ONE"


class AlphaBoundsInverted(ParameterError):
    error_code = "ALPHA_BOUNDS_INVERTED"


class NegativeBudget(ParameterError):
    error_code = "NEGATIVE_BUDGET"


class NegativeRicianFactor(ParameterError):
    error_code = "NEGATIVE_RICIAN_FACTOR"


class NonPositiveCost(ParameterError):
    error_code = "NON_POSITIVE_COST"


class AngleOutOfRange(ParameterError):
    error_code = "ANGLE_OUT_OF_RANGE"


class GeometryMismatch(ParameterError):
    error_code = "GEOMETRY_MISMATCH"


# Numerical / model errors


class DimensionMismatch(SimulatorError, ValueError):
    error_code = "DIMENSION_MISMATCH"


class AmplificationBoundsError(SimulatorError, ValueError):
    error_code = "AMPLIFICATION_OUT_OF_BOUNDS"


class InfeasibleAllocation(SimulatorError, ValueError):
    error_code = "INFEASIBLE_ALLOCATION"


class RegimeError(SimulatorError):
    error_code = "REGIME_VIOLATION"


class ThresholdOrderingError(SimulatorError):
    error_code = "THRESHOLD_ORDERING"


# Configuration and output


class ConfigError(SimulatorError):
    error_code = "INVALID_CONFIG"


class ConfigParseError(ConfigError):
    error_code = "CONFIG_PARSE_ERROR"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownKey(ConfigError):
    error_code = "UNKNOWN_KEY"

    def __init__(self, key: str, section: str = "top level"):
        super().__init__(f"Unknown key '{key}' in {section}")
        self.key = key


class InvalidSweepAxis(ConfigError):
    error_code = "INVALID_SWEEP_AXIS"


class UnknownPreset(ConfigError):
    error_code = "UNKNOWN_PRESET"


class OutputError(SimulatorError):
    error_code = "OUTPUT_ERROR"

    def __init__(self, message: str, path: str):
        super().__init__(f"{message}: {path}")
        self.path = path
