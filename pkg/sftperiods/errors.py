class SftError(Exception):
    """Base class for errors raised by this package."""


class SpecParseError(SftError, ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.message = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DimensionMismatchError(SftError, ValueError):
    pass


class AlphabetMismatchError(SftError, ValueError):
    pass


class UnsupportedSftError(SftError, ValueError):
    pass


class BudgetExhausted(SftError):
    """Raised by the solver when the node or time budget runs out."""

    def __init__(self, message: str, nodes: int = 0, seconds: float = 0.0):
        self.message = message
        self.nodes = nodes
        self.seconds = seconds
        super().__init__(message)


class VertexCapExceeded(BudgetExhausted):
    """A strip graph grew past the configured vertex cap."""
