"""Main CLI entry point."""

import logging

import click
from rich.logging import RichHandler

from .. import __version__
from ..core.config import ConfigManager
from .utils import err_console

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def setup_logging(level: str) -> None:
    """Route log records through rich to stderr so stdout stays machine-readable."""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


@click.group()
@click.version_option(version=__version__, prog_name="lattice-approx")
@click.option("--config", "-c", type=click.Path(), help="Path to config file")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging verbosity (default from config or LATTICE_APPROX_LOG_LEVEL)",
)
@click.pass_context
def main(ctx, config, log_level):
    r"""
    Lattice-based approximation on the unit cube.

    Approximates functions on [0,1]^d with cosine, Chebyshev and transformed
    Fourier systems, sampled along reconstructing rank-1 lattices.

    \b
    Lattices and frequency sets:
      lattice-approx lattice --d 2 --N 8 --strategy cbc
      lattice-approx index-set --d 4 --N 50 --count

    \b
    Single approximations:
      lattice-approx approx --method erf:eta=2.5 --d 1 --N 49
      lattice-approx cheb-equiv --N 16 --grid 101

    \b
    Sweeps and decay rates:
      lattice-approx sweep --d 1 --methods cos,cheb,log,erf --N 1..140 --out d1.csv
      lattice-approx decay d1.csv --compare
      lattice-approx best-eta d1.csv

    \b
    Configuration & cache:
      lattice-approx config set lattice.strategy cbc
      lattice-approx cache list
    """
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config
    ctx.obj["config_manager"] = ConfigManager(config)
    setup_logging(log_level or ctx.obj["config_manager"].config.log_level)


def register_commands():
    # Imported inside the function to avoid circular imports with .app
    from .commands import (
        approx_command,
        best_eta_command,
        cache_group,
        cheb_equiv_command,
        decay_command,
        index_set_command,
        lattice_command,
        reference_command,
        sweep_command,
    )
    from .config import config as config_cmd

    # Lattice tools
    main.add_command(lattice_command)
    main.add_command(index_set_command)
    main.add_command(cache_group)

    # Approximation
    main.add_command(approx_command)
    main.add_command(cheb_equiv_command)

    # Experiments
    main.add_command(sweep_command)
    main.add_command(decay_command)
    main.add_command(best_eta_command)
    main.add_command(reference_command)

    main.add_command(config_cmd)


register_commands()
