"""Exception types shared across the library."""


class RelcoreError(Exception):
    """Base class for every error raised by this library."""


class InvalidLabel(RelcoreError):
    pass


class NotAnInterval(RelcoreError):
    pass


class ArityMismatch(RelcoreError):
    pass


class OrderNotAvailable(RelcoreError):
    pass


class InvalidElement(RelcoreError):
    pass


class SignatureMismatch(RelcoreError):
    pass


class InvalidDimension(RelcoreError):
    pass


class TooLarge(RelcoreError):
    pass


class TooSmall(RelcoreError):
    pass


class BaseMismatch(RelcoreError):
    pass


class Unsupported(RelcoreError):
    pass


class KernelViolation(RelcoreError):
    pass


class HomValidationError(RelcoreError):
    pass
