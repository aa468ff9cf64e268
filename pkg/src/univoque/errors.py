"""Exception hierarchy shared by every module of the package."""


class UnivoqueError(Exception):
    """Base class for all errors raised by univoque."""


class PrecisionExhausted(UnivoqueError):
    """A decision could not be certified at the maximum working precision."""

    def __init__(self, message: str, bits: int | None = None, detail=None):
        super().__init__(message)
        self.bits = bits
        self.detail = detail


class NoSignChange(UnivoqueError):
    """A root bracket does not certify a sign change."""


class IntervalDivisionError(UnivoqueError, ZeroDivisionError):
    """Division by an interval that contains zero."""


class IndistinguishableToHorizon(UnivoqueError):
    """Two sequences agree on every inspected digit."""


class DegenerateSequence(UnivoqueError):
    """The sequence is 0^inf or alpha^inf as far as could be inspected."""


class NotDPositive(UnivoqueError):
    def __init__(self, k: int, m: int):
        super().__init__(f"term m_{k} = {m} points at a zero digit of d")
        self.k = k
        self.m = m


class HypothesisFailed(UnivoqueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class HorizonExhausted(UnivoqueError):
    """A search would read more digits than the configured budget allows."""


class RateTooSlow(UnivoqueError):
    pass


class CrossCheckFailed(UnivoqueError):
    pass


class LevelTooDeep(UnivoqueError):
    pass


class PrefixFreenessViolated(UnivoqueError):
    pass


class GrammarError(UnivoqueError, ValueError):
    """Malformed sequence text."""
