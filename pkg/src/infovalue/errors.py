"""Exception hierarchy shared by every module."""


class InfoValueError(Exception):
    """Base class for all package errors."""


class MalformedInputError(InfoValueError, ValueError):
    """Input data has the wrong shape, labels or syntax."""


class NumericDomainError(InfoValueError, ValueError):
    """A float input is NaN or infinite."""


class PreconditionError(InfoValueError, ValueError):
    """An operation was called outside its domain (e.g. a boundary prior)."""


class RepresentationError(InfoValueError):
    """A function cannot be represented on the requested subdivision."""


class PlausibilityError(PreconditionError):
    """A posterior distribution does not average to the stated prior."""


class InapplicableError(InfoValueError):
    """A constructive procedure does not apply to the given instance."""


class SynthesisError(InfoValueError):
    """Cost synthesis failed to certify a cost within its search budget."""
