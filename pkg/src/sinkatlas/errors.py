"""Exception types raised by sinkatlas."""


class SinkAtlasError(Exception):
    """Base class for every error raised by the library."""


class GameFileError(SinkAtlasError):
    """A game file could not be read, parsed or validated."""

    def __init__(
        self,
        message: str,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path:
            location = path
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(f"{location}{message}")


class ShapeError(SinkAtlasError, ValueError):
    """Array or profile dimensions do not match the game."""


class InvalidProfileError(SinkAtlasError, IndexError):
    """A player or strategy index is out of range."""


class InvalidSubgameError(SinkAtlasError, ValueError):
    """A subgame has an empty or out-of-range strategy subset."""


class ParameterError(SinkAtlasError, ValueError):
    """An argument or configuration value is outside its allowed range."""


class GenericityError(SinkAtlasError):
    """The game is degenerate where the analysis requires a generic game."""

    def __init__(self, message: str, pair: tuple | None = None):
        self.pair = pair
        super().__init__(message)


class StepSizeError(SinkAtlasError):
    """An integration step left the simplex by more than the allowed drift."""


class PreconditionError(SinkAtlasError):
    """An operation was called on an input violating its precondition."""


class ConstructionError(SinkAtlasError):
    """A named game could not be built with the requested parameters."""


class VerificationError(SinkAtlasError):
    """A named game failed one of its scripted checks."""
