"""Exception hierarchy.

Every domain failure derives from :class:`DynMdsError`; the CLI maps these
to exit status 1 and prints the class name.
"""


class DynMdsError(Exception):
    """Base class for domain errors."""


class InvalidField(DynMdsError, ValueError):
    pass


class InvalidElement(DynMdsError, ValueError):
    pass


class ZeroInverse(DynMdsError, ZeroDivisionError):
    pass


class NoGenerator(DynMdsError, RuntimeError):
    pass


class ShapeMismatch(DynMdsError, ValueError):
    pass


class NotSquare(DynMdsError, ValueError):
    pass


class IndexOutOfRange(DynMdsError, IndexError):
    pass


class Singular(DynMdsError, ValueError):
    pass


class NotMds(DynMdsError, ValueError):
    pass


class ZeroConstant(DynMdsError, ValueError):
    pass


class BadPivot(DynMdsError, ValueError):
    pass


class NoInstance(DynMdsError, LookupError):
    pass


class MissingClass(DynMdsError, ValueError):
    pass


class EmptySecret(DynMdsError, ValueError):
    pass
