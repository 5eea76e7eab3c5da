"""Exception types shared across the package."""


class GroundMismatchError(ValueError):
    """Operands belong to different ground structures."""


class ValidationError(ValueError):
    """A value violates a construction invariant."""


class ContractViolation(ValueError):
    """An operation was called with inputs that break its stated precondition."""


class IntegrityError(RuntimeError):
    """An internal consistency check failed, indicating a broken topology or map."""


class ConfigError(ValueError):
    """A configuration file failed to parse or validate."""
