"""Exception types raised by the library."""


class InvalidInput(ValueError):
    """Raised when an argument fails validation."""


class BandIsolationFailure(RuntimeError):
    """Raised when fewer than ``2p`` band edges could be isolated.

    The partially isolated edges are kept on ``partial`` for inspection.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class QuadratureFailure(RuntimeError):
    def __init__(self, message, error_estimate=float("nan")):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConstructionBudgetExceeded(RuntimeError):
    """The candidate search ran out of periods or attempts.

    ``best`` holds the candidate with the smallest certificate gap
    (``rhs - lhs``) seen during the search, ``gap`` that gap, and
    ``records`` any stages completed before the failing one.
    """

    def __init__(self, message, best=None, gap=float("inf"), stage=None, records=None):
        super().__init__(message)
        self.best = best
        self.gap = gap
        self.stage = stage
        self.records = list(records or [])


class InvariantViolation(AssertionError):
    """A proved inequality failed numerically; signals a bug upstream."""


class ThinBandWarning(UserWarning):
    """At least one band is narrower than the resolvable width."""
