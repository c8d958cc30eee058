"""Exception hierarchy shared by the library and the command line front-end."""


class HVBError(Exception):
    """Base class for all errors raised by :mod:`hvb`."""


class InputError(HVBError, ValueError):
    """Malformed or semantically invalid input (CLI exit code 1)."""


class UnsupportedRegimeError(HVBError):
    """The request is well-formed but outside the supported regime (CLI exit code 2)."""


class DecompositionError(HVBError):
    """Krull-Schmidt splitting could neither split a module nor certify it indecomposable."""
