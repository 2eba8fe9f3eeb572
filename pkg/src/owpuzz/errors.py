"""Exception types and the process-wide resource limits."""

from contextlib import contextmanager

DEFAULT_MAX_SUPPORT = 10**6
DEFAULT_TOLERANCE = 1e-9


class OwpuzzError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class DomainError(OwpuzzError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class ContractError(OwpuzzError, ValueError):
    """A documented precondition of an operation was violated."""


class ResourceError(OwpuzzError, RuntimeError):
    """An exact construction would exceed the configured support cap."""

    exit_code = 3


class ParseError(OwpuzzError, ValueError):
    exit_code = 2

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(OwpuzzError, ValueError):
    exit_code = 2


_limits = {"max_support": DEFAULT_MAX_SUPPORT, "tolerance": DEFAULT_TOLERANCE}


def max_support():
    return _limits["max_support"]


def tolerance():
    return _limits["tolerance"]


def set_limits(max_support=None, tolerance=None):
    if max_support is not None:
        if max_support < 1:
            raise ContractError("support cap must be positive")
        _limits["max_support"] = int(max_support)
    if tolerance is not None:
        if tolerance < 0:
            raise ContractError("tolerance must be non-negative")
        _limits["tolerance"] = float(tolerance)


@contextmanager
def limits(max_support=None, tolerance=None):
    """Temporarily override the support cap and/or float tolerance."""
    saved = dict(_limits)
    set_limits(max_support, tolerance)
    try:
        yield
    finally:
        _limits.update(saved)


def check_support(size, what="construction"):
    cap = _limits["max_support"]
    if size > cap:
        raise ResourceError(f"{what} needs {size} outcomes, above the support cap of {cap}")
