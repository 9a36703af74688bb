class PreconditionError(ValueError):
    """An operation was called outside its domain (bad constant term, wrong degree, ...)."""


class TransgressionCheckError(ArithmeticError):
    """The exact identity d(transgression) = w(A1) - w(A0) failed."""
