"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input or API misuse; carries a stable machine-readable code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class ResourceGuardError(RuntimeError):
    """An enumeration would exceed its configured size guard."""


class FalsificationError(RuntimeError):
    """An exact check failed; carries a reproducible counterexample payload."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample if counterexample is not None else {}
