"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ValidationError (and subclasses) -> 1,
OSError -> 2, NumericError / DegeneracyError -> 3.
"""


class GfstabError(Exception):
    """Base class for all package errors."""


class ValidationError(GfstabError):
    """Invalid input data, parameters, or configuration."""


class ParseError(ValidationError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DegenerateInputError(ValidationError):
    """Input is structurally degenerate for the requested operation."""


class ParameterError(ValidationError):
    """Parameter combination outside the operation's admissible range."""


class GapViolationError(GfstabError):
    """The two spectra admit no common cutoff at the requested order."""


class NumericError(GfstabError):
    """A numerical routine failed to converge or produced invalid output."""


class DegeneracyError(GfstabError):
    """A ratio or bound is undefined because a denominator vanished."""
