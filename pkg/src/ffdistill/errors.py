"""Error taxonomy shared across the toolkit.

The CLI maps these onto exit codes: FormatError and InputError are input
problems (exit 2), NumericError covers degenerate or diverging computations
(exit 3). Everything else is a bug.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(ToolkitError):
    """Input data is unusable (missing files, empty corpora, bad joins)."""


class FormatError(InputError):
    """A file violates its declared format. Carries file and line context."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class NumericError(ToolkitError):
    """A computation is undefined or has gone non-finite."""
