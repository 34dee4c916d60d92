"""
Custom exceptions for lattice-approx.

Provides a hierarchy of exceptions so callers (and the CLI) can tell numerical
failures apart from misuse.
"""

from typing import Any, Optional


class ApproximationError(Exception):
    """Base exception for all lattice-approx errors."""

    pass


class ResourceLimitError(ApproximationError):
    """A frequency set or pair enumeration would exceed its configured cap."""

    def __init__(self, what: str, size: int, limit: int, message: str = ""):
        self.what = what
        self.size = size
        self.limit = limit
        default_msg = f"{what} has size {size:,}, exceeding the configured cap of {limit:,}"
        super().__init__(message or default_msg)


class SearchExhaustedError(ApproximationError):
    """No reconstructing lattice was found within the attempt budget."""

    def __init__(self, strategy: str, attempts: int, last_size: int, message: str = ""):
        self.strategy = strategy
        self.attempts = attempts
        self.last_size = last_size
        default_msg = (
            f"Lattice search '{strategy}' exhausted after {attempts} size steps "
            f"(last lattice size M={last_size})"
        )
        super().__init__(message or default_msg)


class DomainError(ApproximationError):
    """An argument lies outside the admissible domain."""

    def __init__(self, what: str, value: Any = None, message: str = ""):
        self.what = what
        self.value = value
        default_msg = f"{what} is outside the admissible domain"
        if value is not None:
            default_msg += f" (got {value})"
        super().__init__(message or default_msg)


class NotInvertibleError(ApproximationError):
    """The transformation has no inverse (tent and Chebyshev are two-to-one)."""

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        default_msg = f"Transform '{kind}' is not invertible"
        super().__init__(message or default_msg)


class BoundarySingularityError(DomainError):
    """Evaluation hit the cube boundary where the basis weight is unbounded."""

    def __init__(self, method: str, message: str = ""):
        self.method = method
        default_msg = (
            f"Method '{method}' is singular on the boundary of the cube; "
            "use interior points or a density weight"
        )
        super().__init__("boundary point", message=message or default_msg)


class PreconditionError(ApproximationError):
    """A documented precondition does not hold."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class NonFiniteSampleError(ApproximationError):
    """The sampled function returned NaN or infinite values."""

    def __init__(self, count: int, message: str = ""):
        self.count = count
        default_msg = f"Function returned {count} non-finite sample(s)"
        super().__init__(message or default_msg)


class DegenerateReferenceError(ApproximationError):
    """Relative error requested against a zero reference vector."""

    def __init__(self, message: str = ""):
        super().__init__(message or "Reference values have zero norm; relative error undefined")


class InsufficientDataError(ApproximationError):
    """Too few usable records to fit a decay rate."""

    def __init__(self, needed: int, got: int, message: str = ""):
        self.needed = needed
        self.got = got
        default_msg = f"Need at least {needed} records with distinct N, got {got}"
        super().__init__(message or default_msg)


class SpecParseError(ApproximationError):
    """A method, transform or range spec string could not be parsed."""

    def __init__(self, kind: str, text: str, hint: Optional[str] = None):
        self.kind = kind
        self.text = text
        self.hint = hint
        default_msg = f"Invalid {kind} spec '{text}'"
        if hint:
            default_msg += f": {hint}"
        super().__init__(default_msg)
