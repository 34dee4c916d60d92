"""Config commands: inspect and edit the YAML configuration."""

import click
import yaml
from rich.table import Table

from .utils import console

SECTION_TITLES = {
    "lattice": "Lattice Search",
    "index_sets": "Index Sets",
    "sweep": "Sweep Defaults",
}


def _format_setting(value) -> str:
    if value is None:
        return "[dim]default[/dim]"
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, int):
        return f"{value:,}"
    return str(value)


@click.group()
def config():
    """Manage configuration."""
    pass


@config.command("show")
@click.pass_context
def config_show(ctx):
    """Show current configuration."""
    manager = ctx.obj["config_manager"]
    data = manager.config.model_dump()

    table = Table(title=f"Configuration ({manager.path})", show_lines=False)
    table.add_column("Setting", style="cyan")
    table.add_column("Value")

    for section, title in SECTION_TITLES.items():
        table.add_row(f"[bold]{title}[/bold]", "")
        for name, value in data[section].items():
            table.add_row(f"  {section}.{name}", _format_setting(value))
    table.add_row("[bold]Logging[/bold]", "")
    table.add_row("  log_level", data["log_level"])

    console.print(table)


@config.command("set")
@click.argument("key")
@click.argument("value")
@click.pass_context
def config_set(ctx, key, value):
    """Set a configuration value (dot notation, e.g. lattice.strategy)."""
    manager = ctx.obj["config_manager"]
    parsed = yaml.safe_load(value)

    try:
        manager.set(key, parsed)
    except KeyError:
        console.print(f"[red]Error:[/red] unknown setting '{key}'")
        raise SystemExit(2)
    except ValueError as e:
        console.print(f"[red]Error:[/red] rejected value for {key}: {e}", highlight=False)
        raise SystemExit(2)

    manager.save()
    console.print(f"[green]✓[/green] {key} -> {parsed!r} (saved to {manager.path})", highlight=False)


@config.command("get")
@click.argument("key")
@click.pass_context
def config_get(ctx, key):
    """Print one configuration value."""
    missing = object()
    value = ctx.obj["config_manager"].get(key, missing)

    if value is missing:
        console.print(f"[red]Error:[/red] unknown setting '{key}'")
        raise SystemExit(2)
    console.print(f"{key} = {value}", highlight=False)
