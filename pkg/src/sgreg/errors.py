"""Exception types raised across the package."""


class SgregError(Exception):
    """Base class for all package errors."""


class InvalidIndexError(SgregError, ValueError):
    pass


class DomainError(SgregError, ValueError):
    pass


class IncompatibleGridError(SgregError, ValueError):
    pass


class OrderingError(SgregError, ValueError):
    pass


class HypothesisError(SgregError, ValueError):
    """The kernel bound hypothesis ``a**k > k*beta`` (with ``beta > 0``) fails.

    The offending values are kept as attributes so callers can report them.
    """

    def __init__(self, a: float, k: float, beta: float, message: str | None = None):
        self.a = a
        self.k = k
        self.beta = beta
        if message is None:
            message = (
                f"Lemma-1 hypothesis a**k > k*beta violated: a={a!r}, k={k!r}, "
                f"beta={beta!r} (a**k={a ** k!r}, k*beta={k * beta!r})"
            )
        super().__init__(message)


class SaturationError(SgregError, OverflowError):
    """A propagator left the representable floating point range."""


class ConfigurationError(SgregError, ValueError):
    pass


class StudyError(SgregError, RuntimeError):
    pass


class DivergenceError(StudyError):
    """A study needed a converged solve and did not get one."""
