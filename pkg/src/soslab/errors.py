"""Error types shared across the library."""


class SoslabError(Exception):
    """Base class for library errors."""


class InvalidInputError(SoslabError, ValueError):
    """Malformed edge, monomial, parameter, or serialized value."""


class ArityError(InvalidInputError):
    """A monomial mixes edge kinds the problem does not have."""


class HonestyError(InvalidInputError):
    """Honest-oracle enumeration requested at a parameter point where no
    integer solution structure exists."""


class ResourceCapError(SoslabError, RuntimeError):
    """An enumeration would exceed the configured cap."""
