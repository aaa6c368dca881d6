"""Exception types shared across the package."""


class PolarimetryError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PolarimetryError, ValueError):
    """An argument is outside its physical or mathematical domain."""


class StokesConsistencyError(DomainError):
    """The three S0 estimates from a six-intensity set disagree.

    Attributes
    ----------
    sums : tuple of float
        The three sums (iH+iV, iD+iA, iR+iL) that should have agreed.
    """

    def __init__(self, sums):
        self.sums = tuple(sums)
        super().__init__(
            "inconsistent S0 estimates: iH+iV=%.12g, iD+iA=%.12g, iR+iL=%.12g"
            % self.sums
        )


class PassivityError(DomainError):
    """A diattenuator would transmit more light than it receives."""


class IncompleteDataError(PolarimetryError):
    """A reconstruction input is missing required coverage."""


class ConfigError(PolarimetryError):
    """A scenario or sample file failed to parse or validate.

    Carries the offending file path and 1-based line number so the CLI can
    point at the exact spot.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
