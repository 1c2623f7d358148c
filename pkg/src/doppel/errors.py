"""Exception types shared across the pipeline stages."""


class DoppelError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DoppelError):
    """Invalid or incomplete configuration (missing files, bad values)."""


class DataError(DoppelError):
    """Malformed input data, e.g. a JSONL line violating the schema."""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line_number is not None:
            prefix += f":{line_number}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NumericError(DoppelError):
    """Numeric failure: non-finite values, shape mismatches, divergence."""
