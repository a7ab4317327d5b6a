"""Exception types raised across the package."""


class GngStreamError(Exception):
    """Base class for all package errors."""


class DegenerateInput(GngStreamError, ValueError):
    """Point set too small or collinear to triangulate."""


class InsufficientData(GngStreamError, ValueError):
    """Not enough distinct instances for the requested fit."""


class EmptyReference(GngStreamError, ValueError):
    pass


class DegenerateConfiguration(GngStreamError, ValueError):
    """Correspondences do not determine a rigid transform."""


class MissingClass(GngStreamError, ValueError):
    pass


class ParseError(GngStreamError, ValueError):
    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class DimensionMismatch(ParseError):
    pass


class OutOfRange(GngStreamError, ValueError):
    pass


class InvalidParams(GngStreamError, ValueError):
    pass


class LengthMismatch(GngStreamError, ValueError):
    pass


class EmptyInput(GngStreamError, ValueError):
    pass


class ConfigError(GngStreamError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
