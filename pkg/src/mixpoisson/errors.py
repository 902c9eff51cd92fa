"""Exception hierarchy."""


class MixPoissonError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MixPoissonError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedFamilyError(MixPoissonError, NotImplementedError):
    """The operation has no implementation for this mixing family."""


class InvalidSpecError(MixPoissonError, ValueError):
    """The mixing law does not generate a valid mixed Poisson distribution."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NegativeProbabilityError(MixPoissonError, ArithmeticError):
    """A computed probability is negative beyond rounding tolerance."""

    def __init__(self, n, value):
        super().__init__(f"probability at n={n} is negative ({value!r})")
        self.n = n
        self.value = value


class InsufficientMassError(MixPoissonError, ValueError):
    """A quantile was requested beyond the mass held by a capped table."""


class OracleOverflowError(MixPoissonError, OverflowError):
    """A Monte Carlo contribution is not representable in binary64."""
