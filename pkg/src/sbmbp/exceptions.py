class InvalidParameterError(ValueError):
    """Model or run parameters violate a precondition."""


class NetworkFormatError(ValueError):
    """A network file could not be parsed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class DegenerateMessageError(FloatingPointError):
    """A BP normalizer vanished, so the message is undefined."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class InstanceTooLargeError(ValueError):
    pass


class ZeroEvidenceError(ValueError):
    """Every assignment has zero weight (e.g. an uncolorable graph)."""
