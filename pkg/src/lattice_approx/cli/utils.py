"""Shared utilities for the lattice-approx CLI."""

import json
import re
import sys
from typing import Any, Dict, List, Optional, Tuple

import click
from rich.console import Console

from ..core.config import ConfigManager
from ..core.exceptions import SpecParseError
from ..core.lattice import LatticeCache
from ..core.testfunctions import get_test_function
from ..utils.paths import get_cache_path

# Reconfigure stdout/stderr for Windows to support UTF-8
if sys.platform == "win32":
    try:
        if hasattr(sys.stdout, "reconfigure"):
            sys.stdout.reconfigure(encoding="utf-8")
        if hasattr(sys.stderr, "reconfigure"):
            sys.stderr.reconfigure(encoding="utf-8")
    except Exception:
        pass

console = Console()
err_console = Console(stderr=True)


_RANGE_PATTERN = re.compile(r"^(?P<start>\d+)(?:\.\.(?P<stop>\d+)(?::(?P<step>\d+))?)?$")


def parse_n_range(text: str) -> List[int]:
    """
    Parse an N range into a sorted list of distinct values.

    Supports:
    - 17          - a single value
    - 1..140      - inclusive range
    - 1..81:2     - inclusive range with step (odd values here)
    - 1..9,17,33  - comma-separated unions of the above
    """
    values = set()
    for part in text.split(","):
        part = part.strip()
        match = _RANGE_PATTERN.match(part)
        if not match:
            raise SpecParseError("N range", text, f"'{part}' is not of the form a..b[:step]")
        start = int(match.group("start"))
        stop = int(match.group("stop") or start)
        step = int(match.group("step") or 1)
        if step < 1:
            raise SpecParseError("N range", text, "step must be >= 1")
        if stop < start:
            raise SpecParseError("N range", text, f"'{part}' is empty")
        values.update(range(start, stop + 1, step))
    if not values:
        raise SpecParseError("N range", text, "no values")
    if min(values) < 1:
        raise SpecParseError("N range", text, "N must be >= 1")
    return sorted(values)


def parse_window(text: str) -> Tuple[int, int]:
    """Parse an inclusive window `a..b`."""
    match = _RANGE_PATTERN.match(text.strip())
    if not match or match.group("stop") is None or match.group("step") is not None:
        raise SpecParseError("window", text, "expected a..b")
    lo, hi = int(match.group("start")), int(match.group("stop"))
    if hi < lo:
        raise SpecParseError("window", text, "upper end below lower end")
    return lo, hi


def split_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


class NRange(click.ParamType):
    """Click parameter for the N range grammar."""

    name = "N-range"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return parse_n_range(value)
        except SpecParseError as e:
            self.fail(str(e), param, ctx)


class Window(click.ParamType):
    """Click parameter for an inclusive `a..b` window."""

    name = "a..b"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_window(value)
        except SpecParseError as e:
            self.fail(str(e), param, ctx)


class FloatList(click.ParamType):
    """Comma-separated floats."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return [float(v) for v in split_list(value)]
        except ValueError:
            self.fail(f"'{value}' is not a comma-separated list of numbers", param, ctx)


def get_function(name: str, d: int):
    """Test function by name, as a click usage error when unknown."""
    try:
        return get_test_function(name, d)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--function")


def lattice_cache(config_manager: ConfigManager, no_cache: bool = False) -> Optional[LatticeCache]:
    """The configured lattice cache, or None when caching is off."""
    cfg = config_manager.config.lattice
    if no_cache or not cfg.use_cache:
        return None
    return LatticeCache(get_cache_path(cfg.cache_path))


def echo_json(data: Dict[str, Any]) -> None:
    """Machine-readable output on stdout (no rich markup)."""
    click.echo(json.dumps(data, sort_keys=True))


def format_error(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4e}"
