"""Exception hierarchy shared by every module.

Each class carries the process exit code the CLI uses for it, so callers
can map failures to stable codes without a lookup table.
"""


class KpathError(Exception):
    exit_code = 1


class ParseError(KpathError):
    """Malformed input text. ``line`` is 1-based when known."""

    exit_code = 3

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(KpathError, ValueError):
    exit_code = 2


class DomainError(KpathError, ValueError):
    exit_code = 4


class GenerationError(KpathError):
    exit_code = 5
