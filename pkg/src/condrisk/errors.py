"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: data-shaped failures (parsing,
degenerate tables, undefined correlations) exit 2, parameter-domain
failures (inadmissible probabilities or correlations, undefined
population measures) exit 3.
"""


class CondRiskError(Exception):
    """Base class for all package errors."""


class DomainError(CondRiskError, ValueError):
    """Parameters outside their mathematical domain (probabilities,
    correlations, confidence levels)."""


class UndefinedMeasureError(DomainError):
    """A population measure has a zero denominator."""


class DegenerateTableError(CondRiskError, ValueError):
    """A table cell or margin needed by an estimator is zero."""


class UndefinedCorrelationError(DegenerateTableError):
    """A phi-coefficient margin is zero, so the correlation is undefined."""


class ParseError(CondRiskError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
