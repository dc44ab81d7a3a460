"""
Exception hierarchy for digitdim.

Every failure the library raises on purpose derives from DigitDimError, so
callers (and the CLI) can catch one type. Invalid domains are always
surfaced as exceptions; nothing returns NaN or an empty interval.
"""


class DigitDimError(Exception):
    """Base class for all digitdim errors"""


class DomainError(DigitDimError, ValueError):
    """A mathematical operation was applied outside its domain"""


class ParameterError(DigitDimError, ValueError):
    """A parameter violates an operation's precondition"""


class SystemSpecError(ParameterError):
    """A digit-system text description could not be parsed"""


class UnsupportedError(DigitDimError):
    """The operation is not defined for this kind of input"""


class EnumerationLimitError(DigitDimError):
    """A direct enumeration would exceed its size guard"""


class NotFoundError(DigitDimError, LookupError):
    """A search finished without finding a qualifying value"""


class CertificateError(DigitDimError):
    """A serialized certificate is malformed"""
