"""Exception types shared across the package.

Every anticipated failure mode raises one of these instead of a bare
ValueError so callers (and the CLI exit-code mapping) can tell input
problems, numerical degeneracies, and network faults apart.
"""


class BreakmetricsError(Exception):
    """Base class for all package errors."""


# --- numerical kernel ---

class DimensionMismatch(BreakmetricsError):
    pass


class RankDeficient(BreakmetricsError):
    pass


class NotPositiveDefinite(BreakmetricsError):
    pass


class BandwidthTooLarge(BreakmetricsError):
    pass


class DegenerateFit(BreakmetricsError):
    """Zero-SSR fit where a variance estimate is required."""


class ZeroVariance(BreakmetricsError):
    pass


# --- data model ---

class DataError(BreakmetricsError):
    pass


class EmptyFile(DataError):
    pass


class GapInYears(DataError):
    pass


class NonNumericCell(DataError):
    pass


class DuplicateColumn(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class BreakOutOfRange(DataError):
    pass


class AlignmentMismatch(DataError):
    pass


# --- tests and estimators ---

class DegenerateRegression(BreakmetricsError):
    pass


class TrimOutOfRange(BreakmetricsError):
    pass


class InsufficientSample(BreakmetricsError):
    pass


class UnitRootDenominator(BreakmetricsError):
    pass


class InvalidSpec(BreakmetricsError):
    pass


# --- pipeline / IO ---

class ConfigError(BreakmetricsError):
    pass


class MalformedExpectations(BreakmetricsError):
    pass


class IoFailure(BreakmetricsError):
    pass


class NetworkUnavailable(BreakmetricsError):
    pass


class HttpStatus(BreakmetricsError):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        super().__init__(f"HTTP status {code}" + (f": {message}" if message else ""))


class MalformedPayload(BreakmetricsError):
    pass


class CollinearAugmentation(UserWarning):
    """RESET fitted-value powers collinear with the base design."""


class NearCollinearRegressors(UserWarning):
    """Regressors close to linearly dependent; estimates may be fragile."""
