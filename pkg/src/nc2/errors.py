class Nc2Error(Exception):
    """Base class for errors raised by nc2."""


class ParseError(Nc2Error, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CycleError(Nc2Error, ValueError):
    """The graph contains a directed cycle."""


class PreconditionError(Nc2Error, ValueError):
    """An operation was called outside its domain.

    ``kind`` is a short machine-readable tag (e.g. ``"span-overlap"``).
    """

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class ConstructionError(Nc2Error, RuntimeError):
    """A randomized search ran out of attempts."""


class LemmaAssertionError(Nc2Error, AssertionError):
    """A constructive step failed to meet the postcondition it is guaranteed to meet."""
