"""Exception hierarchy shared across the package."""


class RanforgeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(RanforgeError):
    """Scenario document violates the schema (unknown key, wrong type).

    Carries the offending key path, e.g. ``sites[2].azimuths``.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message} (at: {path})" if path else message)


class ValidationError(RanforgeError):
    """Scenario document is well-formed but breaks an invariant."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message} (at: {path})" if path else message)


class ConfigError(RanforgeError):
    """A run was requested with settings the chosen mode cannot honor."""


class DomainError(RanforgeError):
    """Input lies outside a model's validity range (strict mode only)."""


class EmptyInput(RanforgeError):
    """An operation that needs at least one sample received none."""


class MissingReference(RanforgeError):
    """A requested reference curve is not present in the reference set."""


class IoError(RanforgeError):
    """Writing an output artifact failed."""
