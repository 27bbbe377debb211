"""Error type shared by every module."""

from __future__ import annotations


class PatrolError(ValueError):
    """A failed precondition, tagged with a stable machine-readable code."""

    def __init__(self, code: str, message: str = "") -> None:
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)
