class FlowGEBDError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(FlowGEBDError):
    """A source file, header, or schema did not parse or validate."""


class ConfigError(FlowGEBDError, ValueError):
    """A parameter or geometry configuration is invalid."""


class EvalValidationError(FlowGEBDError, ValueError):
    """Predictions and annotations are mutually inconsistent."""
