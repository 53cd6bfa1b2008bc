"""
Exception hierarchy for concurrex.
Every error carries the exit code the CLI reports for it.
"""

from typing import Optional

from concurrex.exit_codes import ExitCode


class ConcurrexError(Exception):
    """Base class for all concurrex errors."""

    exit_code = ExitCode.GENERAL_ERROR
    invariant: Optional[str] = None


class ValidationError(ConcurrexError):
    """Input violates a documented invariant."""

    exit_code = ExitCode.VALIDATION_FAILURE

    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        self.invariant = invariant


class ZeroState(ValidationError):
    """Amplitude vector has (numerically) zero norm."""


class NormViolation(ValidationError):
    """Amplitude norm deviates from 1 beyond tolerance in strict mode."""


class DimensionMismatch(ValidationError):
    """Matrix size does not factor as dim_a * dim_b, or operands disagree."""


class InvalidIsometry(ValidationError):
    """Matrix columns are not orthonormal within tolerance."""


class RankDeficient(ValidationError):
    """Density matrix has numerical rank zero."""


class ConfigError(ValidationError):
    """Optimizer or command configuration is inconsistent with the input."""


class ProblemTooLarge(ConfigError):
    """Requested computation exceeds its size guard."""


class ZeroOperator(ValidationError):
    """Operator has zero Hilbert-Schmidt norm."""


class ParamError(ValidationError):
    """State-family or scan parameters are out of range."""


class NullOutcome(ValidationError):
    """Channel output has zero trace."""


class IncompleteInstrument(ValidationError):
    """Branch probabilities of an instrument do not sum to one."""


class ModeUnsupported(ValidationError):
    """Audit mode cannot be applied to the given state or channel."""


class KindError(ValidationError):
    """State kind (pure/mixed) does not fit the command."""


class ParseError(ConcurrexError):
    """State, channel or config file is malformed."""

    exit_code = ExitCode.PARSE_FAILURE

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.path = path
        self.line = line
        self.field = field


class InvariantBreach(ConcurrexError):
    """A run-time numerical invariant failed."""

    exit_code = ExitCode.INVARIANT_BREACH

    def __init__(self, invariant: str, message: str):
        super().__init__(f"[{invariant}] {message}")
        self.invariant = invariant
