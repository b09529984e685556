"""Exception hierarchy shared across the toolkit.

The three families map onto the CLI exit codes: ValidationError -> 1
(usage), DataError -> 2 (I/O and schema), NumericsError -> 3 (numerical
failure).
"""


class PvtsoftError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(PvtsoftError):
    """Invalid argument or configuration value."""


class DataError(PvtsoftError):
    """Problem with an input file: missing, malformed, or schema mismatch."""


class SchemaError(DataError):
    """CSV header does not match the fixed column schema."""


class CsvParseError(DataError):
    """A cell could not be parsed; message carries row and column."""


class NumericsError(PvtsoftError):
    """Numerical failure: singular systems, degenerate data, divergence."""


class SingularMatrixError(NumericsError):
    """Linear system is singular within the pivot tolerance."""


class DegenerateColumnError(NumericsError):
    """A column is constant, so the min-max map is undefined."""


class OptimizationError(NumericsError):
    """An optimizer could not produce a finite candidate."""


class TrainingError(NumericsError):
    """Model training failed."""


class TrainingDivergedError(TrainingError):
    """Gradient descent cost exceeded the divergence threshold."""
