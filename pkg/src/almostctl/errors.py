"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations


class AlmostError(Exception):
    """Base class for all toolkit errors."""


class UsageError(AlmostError):
    """An operation was called outside its precondition."""


class HorizonError(AlmostError):
    """A lazy level system was evaluated past the configured horizon."""


class ParseError(AlmostError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"col {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
