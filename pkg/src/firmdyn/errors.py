"""Exception hierarchy shared by every firmdyn module."""


class FirmDynError(Exception):
    """Base class for all errors raised by firmdyn."""


class DomainError(FirmDynError, ValueError):
    """A state or parameter lies outside the domain of the map."""


class ConfigError(FirmDynError, ValueError):
    """Invalid sweep, calibration or run configuration."""


class InsufficientDataError(FirmDynError, ValueError):
    pass


class BracketError(FirmDynError):
    """A period transition is not bracketed by the swept range."""


class DegenerateSeparationError(FirmDynError, ArithmeticError):
    pass


class TheoryError(FirmDynError, ValueError):
    """Missing, duplicate or unknown theory-of-the-firm channel."""


class IngestError(FirmDynError, ValueError):
    pass


class ParseError(IngestError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownTheoryError(IngestError, TheoryError):
    pass


class NonMonotonicDateError(IngestError):
    pass


class DegenerateSeriesError(IngestError):
    pass
