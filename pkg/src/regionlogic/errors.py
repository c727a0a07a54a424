"""Exception hierarchy shared across the package."""


class RegionLogicError(Exception):
    """Base class for all regionlogic errors."""


class DimensionMismatchError(RegionLogicError):
    """Image, label map, or mask shapes do not agree."""


class LabelMapError(RegionLogicError):
    """Label-map file is unreadable, multi-channel, or contains no regions."""


class GroundTruthError(RegionLogicError):
    """Ground-truth mask set is empty or malformed."""


class EmptyStateSetError(RegionLogicError):
    """An operation requiring at least one state received none."""


class LiteralRangeError(RegionLogicError):
    """A logic literal references a region outside 1..=M."""


class TruthTableLimitError(RegionLogicError):
    """Exhaustive equivalence check requested for too many regions."""


class PredictorError(RegionLogicError):
    """Base class for prediction failures."""


class TransportError(PredictorError):
    """The remote predictor is unreachable or the connection broke.

    ``index`` is the position of the failing item within a batch, when known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class PredictorTimeoutError(PredictorError):
    """The remote predictor did not answer within the configured timeout."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class MalformedResponseError(PredictorError):
    """The remote predictor answered with bytes the protocol cannot parse."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class RemoteModelError(PredictorError):
    """The remote predictor returned an explicit error response."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class QueryBudgetExceededError(RegionLogicError):
    """Refinement hit the query budget before completing.

    Carries the partial result so callers can inspect it; partial state sets
    are never returned through the normal path.
    """

    def __init__(self, message: str, query_count: int, partial_states=frozenset()):
        super().__init__(message)
        self.query_count = query_count
        self.partial_states = partial_states


class ConfigError(RegionLogicError):
    """Invalid command-line configuration (bad path, flag, or range)."""
