"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedParameterError(DomainError):
    """A parameter regime the implemented formulas do not cover."""


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown fields, bad values)."""
