"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value (modulus count, mode, mismatched sets)."""


class DimensionError(ValueError):
    """Matrix shape or inner-dimension constraint violated."""


class DomainError(ValueError):
    """Input value outside the operation's domain (non-finite, too large)."""
