"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class VarmultError(ValueError):
    """Base error. ``context`` holds the offending fields for diagnostics."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        detail = ", ".join(f"{k}={v!r}" for k, v in sorted(self.context.items()))
        return f"{base} ({detail})"


class SpaceMismatchError(VarmultError):
    """Shapes or spaces of two objects do not agree."""


class ParameterError(VarmultError):
    """An exponent or size parameter is outside its admissible range."""


class NoClosedFormError(VarmultError):
    """Exact evaluation requested where only an estimate exists."""


class OracleLimitError(VarmultError):
    """Input too large for an exhaustive oracle."""
