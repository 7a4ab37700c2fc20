"""
Exceptions raised by the models.
"""


class InputError(ValueError):
    """
    Raised when an argument violates a documented precondition.
    """


class UnsupportedError(InputError):
    """
    Raised for constructions outside the supported family.
    """
