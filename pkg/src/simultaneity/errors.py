"""Exception hierarchy shared by every module."""


class SimultaneityError(Exception):
    """Base class for all library errors."""


class ValidationError(SimultaneityError, ValueError):
    """Input violates a type invariant or precondition."""


class DomainError(SimultaneityError, ValueError):
    """A parameter lies outside its mathematical domain (e.g. |v| >= 1)."""


class ConfigError(SimultaneityError):
    """Scenario or run configuration is inconsistent or incomplete."""


class ParseError(ConfigError):
    """Malformed scenario text; carries the offending line and column."""

    def __init__(self, message: str, line: int, column: int = 1, source: str = "<scenario>"):
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class UncoveredEpochError(SimultaneityError, ValueError):
    """Instant lies before the first entry of a leap table."""


class NonexistentTimeError(SimultaneityError, ValueError):
    """Local wall-clock time falls inside a spring-forward gap."""
