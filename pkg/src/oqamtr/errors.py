"""Exception hierarchy shared by all modules."""


class OqamTrError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(OqamTrError, ValueError):
    pass


class FramingError(OqamTrError, ValueError):
    """Raised when array sizes do not fit the expected frame layout."""


class DegenerateChannelError(OqamTrError, ValueError):
    pass


class SingularChannelError(OqamTrError, ZeroDivisionError):
    """A subcarrier has zero gain where an inverse is required.

    ``subcarriers`` holds the offending indices.
    """

    def __init__(self, message, subcarriers=()):
        super().__init__(message)
        self.subcarriers = tuple(int(s) for s in subcarriers)


class ConvergenceError(OqamTrError, RuntimeError):
    def __init__(self, message, best_defect, best_coeffs=None):
        super().__init__(message)
        self.best_defect = best_defect
        self.best_coeffs = best_coeffs
