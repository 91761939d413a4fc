"""Exception types shared across the package."""


class QGamesError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(QGamesError):
    """Matrix / tensor dimensions are inconsistent for the requested operation."""


class DimensionLimitError(QGamesError):
    """A tensor product would exceed the configured dimension cap."""


class ChannelError(QGamesError):
    """A Kraus operator set is not trace preserving."""


class ValidationError(QGamesError):
    """A value violates one of its type invariants."""


class ParameterError(QGamesError):
    """A parameter is out of range or violates a constraint."""


class UnsupportedError(QGamesError):
    """The requested computation is outside the supported problem class."""


class GameFileError(QGamesError):
    """A game definition file failed schema validation.

    ``errors`` holds one ``"<field path>: <message>"`` string per problem.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
