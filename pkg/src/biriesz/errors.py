"""Exception hierarchy shared by all modules."""


class BiRieszError(Exception):
    """Base class for errors raised by :mod:`biriesz`."""


class DomainError(BiRieszError, ValueError):
    """An argument lies outside the supported domain of an operation."""


class SpaceMismatchError(BiRieszError, ValueError):
    """A grid function is tagged with the wrong space, or grids disagree."""


class AliasingError(BiRieszError, ValueError):
    """Input spectra reach outside the guard band reserved for products."""


class UnderResolvedError(BiRieszError, ValueError):
    """The grid is too coarse for the profile or annulus being sampled."""


class ResourceCapError(BiRieszError, RuntimeError):
    """The requested computation exceeds the configured sample budget."""


class NonFiniteError(BiRieszError, FloatingPointError):
    """A non-finite intermediate value appeared during an iterative run."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
