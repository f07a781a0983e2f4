"""Exception hierarchy shared by all nilclean modules."""


class NilcleanError(Exception):
    """Base class for all errors raised by this package."""


class InputError(NilcleanError):
    """Malformed or inconsistent input (bad dimensions, bad parse, non-coprime split)."""


class UnsupportedRingError(NilcleanError):
    """The requested ring is outside the family the construction supports."""


class DomainError(NilcleanError):
    """A documented precondition on the mathematical input is violated."""


class ResourceCapError(NilcleanError):
    """An exhaustive scan would exceed the configured size cap."""


class InternalCheckError(NilcleanError):
    """A construction failed its own verification; indicates a bug, never bad input."""
