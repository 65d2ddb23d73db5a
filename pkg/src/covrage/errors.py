"""Exception types shared across the package."""


class CovrageError(Exception):
    """Base class for package-specific errors."""


class ConfigError(CovrageError):
    """A scenario or array configuration is malformed or inconsistent."""


class InvalidUvError(CovrageError, ValueError):
    """A sine-space coordinate pair lies outside the unit disc."""


class HemisphereError(CovrageError, ValueError):
    """A direction or trajectory sample left the front hemisphere."""
