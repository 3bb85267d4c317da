"""Exception types shared across the package."""

from __future__ import annotations


class AffectNormError(Exception):
    """Base class for every error raised by affectnorm."""


class CsvFormatError(AffectNormError, ValueError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(AffectNormError, ValueError):
    """An input violated a documented contract (range, shape, mode, ...)."""


class DuplicateEntryError(ValidationError):
    """A keyed data file defined the same key twice."""


class NotFoundError(AffectNormError, LookupError):
    """A label lookup failed; carries the label and category searched."""

    def __init__(self, label: str, category: str):
        self.label = label
        self.category = category
        super().__init__(f"no {category} entry for label {label!r}")


class ScenarioError(ValidationError):
    """A scenario document is missing fields or combines them illegally."""
