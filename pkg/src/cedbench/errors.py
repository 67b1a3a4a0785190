from __future__ import annotations


class CedError(Exception):
    """Base class for all errors raised by cedbench."""


class ConfigError(CedError):
    """Invalid simulator configuration or noise-model parameters."""


class DatasetParseError(CedError):
    """A dataset line is not well-formed structured text."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ValidationError(CedError):
    """Input parsed but violates a schema or type invariant."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.message = message
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where) + ": " if where else ""
        super().__init__(prefix + message)


class DatasetValidationError(ValidationError):
    """A dataset record violates the record schema."""
