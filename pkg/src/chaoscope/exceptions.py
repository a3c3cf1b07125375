class InputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class ConfigError(InputError):
    """A malformed run configuration; carries the offending line number."""

    def __init__(self, message, lineno=None, source="config"):
        self.lineno = lineno
        self.source = source
        where = f"{source}:{lineno}: " if lineno is not None else f"{source}: "
        super().__init__(where + message)
