"""Exception types shared across the analyzer."""

from __future__ import annotations


class IoreachError(Exception):
    """Base class for all analyzer errors."""


class MalformedClassFile(IoreachError):
    """The byte stream is not a structurally valid class file."""

    def __init__(self, message: str, source: str | None = None):
        self.source = source
        super().__init__(f"{source}: {message}" if source else message)


class UnsupportedVersion(IoreachError):
    """Class-file major version above the supported ceiling."""

    def __init__(self, major: int, ceiling: int, source: str | None = None):
        self.major = major
        self.ceiling = ceiling
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}class-file major version {major} exceeds supported ceiling {ceiling}")


class InvalidDescriptor(IoreachError):
    """String does not conform to the JVM descriptor grammar."""


class IoFailure(IoreachError):
    """A container path could not be read."""


class BadRecord(IoreachError):
    """A category database line is malformed."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class BadTraceLine(IoreachError):
    """A trace line is malformed."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class UncataloguedNative(IoreachError):
    """A reachable or executed native method has no category entry."""

    def __init__(self, refs):
        self.refs = tuple(refs)
        listing = ", ".join(str(r) for r in self.refs)
        super().__init__(f"native method(s) missing from the category database: {listing}")


class NoEntryPoints(IoreachError):
    """Call-graph construction was asked to start from an empty entry set."""
