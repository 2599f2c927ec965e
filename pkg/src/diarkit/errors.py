"""Exception types shared across the toolkit."""


class DiarkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DiarkitError):
    """Invalid configuration or parameter combination."""


class ParseError(DiarkitError):
    """Malformed text input (RTTM/UEM)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(DiarkitError):
    """Malformed binary feature container."""


class ValidationError(DiarkitError):
    """Structurally valid input with out-of-contract values."""


class PipelineError(DiarkitError):
    """Per-recording processing failure."""
