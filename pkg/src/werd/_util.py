"""Shared plumbing: error types, atomic file writes, canonical number formatting."""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path


class WerdError(Exception):
    """Base class for errors raised by this package."""


class DataError(WerdError):
    """A data file (corpus, segment file, table, report) is malformed."""

    def __init__(self, message: str, path: str | os.PathLike | None = None,
                 line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        loc = ""
        if self.path is not None:
            loc = self.path if line is None else f"{self.path}:{line}"
            loc += ": "
        super().__init__(loc + message)


@contextmanager
def atomic_open(path: str | os.PathLike):
    """Open ``path`` for writing via a same-directory temp file.

    The temp file replaces ``path`` only when the writer finishes without
    raising, so a failed command never leaves a partial output behind.
    """
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."),
                               prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt_num(x: float) -> str:
    """Canonical decimal rendering: up to 4 places, no trailing zeros."""
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return s if s else "0"
