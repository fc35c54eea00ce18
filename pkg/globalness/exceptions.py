from django.core.exceptions import ValidationError


class OperatorValidationError(ValidationError):
    """A matrix, state or spectrum fails a numerical contract (unitarity, norm, completeness)."""

    def __init__(self, message, code='invalid', params=None):
        super().__init__(message, code=code, params=params)

    def __str__(self):
        return self.messages[0]


class UsageError(ValueError):
    """The call itself is malformed: bad indices, empty cuts, unknown names."""


class DimensionMismatchError(UsageError):
    pass


class ParseError(ValueError):
    """Input files or names could not be read."""
