"""Exception hierarchy shared by every module."""


class TSQError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(TSQError, ValueError):
    """Input is malformed: wrong shape, out-of-range symbol, bad syntax."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        msg = super().__str__()
        if self.line is not None:
            loc = f"line {self.line}"
            if self.column is not None:
                loc += f", column {self.column}"
            return f"{loc}: {msg}"
        return msg


class DomainError(TSQError, ValueError):
    """Well-formed input that violates an operation's precondition."""


class RefusalError(TSQError):
    """The requested size is beyond what the operation is meant to handle."""


class CorruptionError(TSQError):
    """Stored data is inconsistent; usually a canonicalization bug."""


class CorruptRunError(CorruptionError):
    """A spilled run file failed validation."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class StoreIOError(TSQError, OSError):
    """Writing a shard to disk failed; the shard is still in memory."""


class AuditError(TSQError):
    """Orbit-stabilizer bookkeeping disagreed."""
