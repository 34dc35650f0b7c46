"""Exception hierarchy shared across the package."""


class EigenmarkError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EigenmarkError, ValueError):
    """Invalid register size, shot count, experiment setting, or variable cap."""


class GateError(EigenmarkError, ValueError):
    """A gate does not fit the register it is applied to."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"gate #{position}: {message}"
        super().__init__(message)
        self.position = position


class ParseError(EigenmarkError, ValueError):
    """Formula text does not match the grammar."""

    def __init__(self, message, position, text=""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


class EvaluationError(EigenmarkError, KeyError):
    """A formula references a variable that the assignment does not bind."""

    def __str__(self):
        return self.args[0] if self.args else "evaluation error"


class MetricError(EigenmarkError, ValueError):
    """A metric is undefined for the given histogram or scenario set."""
