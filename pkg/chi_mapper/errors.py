class ChiMapperError(ValueError):
    """Base class for every error raised by chi_mapper."""


class InvalidPauliError(ChiMapperError):
    pass


class InvalidIndexError(ChiMapperError):
    pass


class DimensionMismatchError(ChiMapperError):
    pass


class TableValidationError(ChiMapperError):
    pass


class InfeasibleSummaryError(ChiMapperError):
    pass


class InvalidTargetError(ChiMapperError):
    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class InvalidProcessError(ChiMapperError):
    pass


class OracleSizeError(ChiMapperError):
    pass
