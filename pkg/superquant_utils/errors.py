class ToolkitError(Exception):
    """Base class for domain errors raised by the toolkit services."""


class ConfigError(Exception):
    """Raised when a job configuration cannot be parsed or validated."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        location = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{location}")
