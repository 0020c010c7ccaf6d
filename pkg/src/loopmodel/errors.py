"""Shared exception types."""
from __future__ import annotations


class CapacityError(RuntimeError):
    """A requested size exceeds a configured capacity ceiling.

    Raised instead of silently attempting runs whose time or memory cost
    would be astronomical.  The message always names the ceiling and the
    override knob, so the caller can raise the ceiling deliberately.
    """


class ConjectureViolation(RuntimeError):
    """An exact structural property expected of the operator sum failed.

    Carries a ``details`` dict describing what was checked and what was
    found, so verification drivers can fold the failure into a report
    instead of crashing.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}
