"""
CLI Error Handling Utilities

Turns library exceptions into readable messages with suggestions and the
documented exit codes: 1 for numerical failures, 2 for usage errors.
"""

import sys
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

import click
from pydantic import ValidationError as PydanticValidationError

from ..core.exceptions import (
    ApproximationError,
    BoundarySingularityError,
    InsufficientDataError,
    NonFiniteSampleError,
    ResourceLimitError,
    SearchExhaustedError,
    SpecParseError,
)
from .utils import err_console

EXIT_NUMERICAL_FAILURE = 1
EXIT_USAGE = 2


class CLIError(Exception):
    """A failure to report on stderr, with an optional hint and key/value details."""

    def __init__(
        self,
        message: str,
        suggestion: Optional[str] = None,
        context: Optional[Dict[str, str]] = None,
        exit_code: int = EXIT_NUMERICAL_FAILURE,
    ):
        super().__init__(message)
        self.message, self.suggestion, self.exit_code = message, suggestion, exit_code
        self.context = dict(context or {})

    def lines(self) -> Iterator[str]:
        yield f"[red]Error:[/red] {self.message}"
        if self.suggestion:
            yield f"[yellow]Suggestion:[/yellow] {self.suggestion}"
        if self.context:
            yield "[dim]Context:[/dim]"
            yield from (f"  {k}: {v}" for k, v in self.context.items())

    def display(self) -> None:
        for line in self.lines():
            err_console.print(line, highlight=False)


def suggestion_for(error: ApproximationError) -> Optional[str]:
    """A likely next step for a library error, if one is known."""
    if isinstance(error, SearchExhaustedError):
        return (
            "Allow more size steps:\n"
            "  • lattice-approx config set lattice.max_attempts 256\n"
            "  • Or try the other strategy: --strategy cbc"
        )
    if isinstance(error, ResourceLimitError):
        return "Lower N, or raise index_sets.max_cardinality / index_sets.max_pairs"
    if isinstance(error, BoundarySingularityError):
        return "Evaluate at interior points, or use a density weight (e.g. log:eta=4:weight=rho)"
    if isinstance(error, NonFiniteSampleError):
        return "Check that the function is finite on the transformed lattice nodes"
    if isinstance(error, InsufficientDataError):
        return "Run the sweep over more N values or widen --window"
    return None


def fail(error: ApproximationError) -> None:
    """Display a numerical failure and exit with code 1."""
    CLIError(str(error), suggestion_for(error), {"type": type(error).__name__}).display()
    sys.exit(EXIT_NUMERICAL_FAILURE)


@contextmanager
def translate_errors() -> Iterator[None]:
    """Map library exceptions to exit codes.

    Malformed method strings and invalid settings problems become usage errors (exit 2),
    every other ApproximationError is a numerical failure (exit 1).
    """
    try:
        yield
    except SpecParseError as e:
        raise click.UsageError(str(e))
    except PydanticValidationError as e:
        raise click.UsageError(
            "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        )
    except ApproximationError as e:
        fail(e)
