class MixedMultError(Exception):
    """Base class for all errors raised by mixedmult."""


class ZeroIdealError(MixedMultError):
    def __init__(self):
        super().__init__("zero ideal unsupported")


class DimensionMismatchError(MixedMultError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch: expected {expected}, got {got}")


class NotPrimaryError(MixedMultError):
    """The ideal does not contain a pure power of every variable."""

    def __init__(self, message="infinite colength"):
        super().__init__(message)


class InsufficientTermsError(MixedMultError):
    pass


class PeriodSearchError(MixedMultError):
    """
    No candidate period verified the Veronese equality.

    Attributes
    ----------
    best_candidate : int
        candidate that survived the most checks
    first_failure : int
        first i at which the best candidate failed
    """

    def __init__(self, best_candidate, first_failure, check_bound):
        self.best_candidate = best_candidate
        self.first_failure = first_failure
        self.check_bound = check_bound
        super().__init__(
            f"no period verified up to i={check_bound}; best candidate "
            f"s={best_candidate} first fails at i={first_failure}"
        )


class UnverifiedPeriodError(MixedMultError):
    def __init__(self, period, verified):
        self.period = period
        self.verified = verified
        if verified is None:
            super().__init__(
                "truncation has no verified period; run the period search "
                "with a larger check_bound first"
            )
            return
        super().__init__(
            f"period {period} is not a multiple of the verified period "
            f"{verified}; raise check_bound and verify again"
        )


class SingularSampleError(MixedMultError):
    pass


class ConfigError(MixedMultError):
    pass
