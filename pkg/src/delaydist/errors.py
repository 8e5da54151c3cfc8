"""Exception hierarchy.

Every error the toolkit raises on purpose derives from ``DelayDistError``.
The three intermediate classes group errors by what went wrong so the CLI
can map them onto exit codes.
"""


class DelayDistError(Exception):
    pass


class ParseError(DelayDistError):
    """Input text or file could not be understood."""


class ZeroParsedLines(ParseError):
    pass


class SchemaError(ParseError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(DelayDistError):
    """Input was well-formed but cannot support the requested computation."""


class NoSamples(DataError):
    pass


class TooFewSamples(DataError):
    pass


class MixedSizes(DataError):
    pass


class KindError(DataError):
    pass


class DegenerateScale(DataError):
    pass


class EqualSizes(DataError):
    pass


class NonPositiveCapacity(DataError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class ConstantVector(DataError):
    pass


class BadProbability(DataError, ValueError):
    pass


class ProbeError(DelayDistError):
    """Live measurement failed."""


class PingUnavailable(ProbeError):
    pass


class HostUnresolvable(ProbeError):
    pass


class AllLost(ProbeError):
    pass


class NegativeDminWarning(UserWarning):
    """Fitted size-zero delay came out below zero (noisy minima, short path)."""
