"""Lattice search, frequency-set and lattice-cache commands."""

import sys

import click
from rich.prompt import Confirm
from rich.table import Table

from ...core.index_sets import cross_cardinality, hyperbolic_cross, write_frequency_set
from ...core.lattice import (
    STRATEGIES,
    LatticeCache,
    check_difference_condition,
    find_reconstructing_lattice,
    is_reconstructing,
)
from ..error_handling import translate_errors
from ..utils import console, echo_json, lattice_cache


@click.command("lattice")
@click.option("--d", "d", type=click.IntRange(min=1), required=True, help="Dimension")
@click.option("--N", "N", type=click.IntRange(min=1), required=True, help="Hyperbolic cross refinement")
@click.option("--nonneg", is_flag=True, help="Use the non-negative cross instead of the full one")
@click.option("--strategy", type=click.Choice(STRATEGIES), help="Search strategy (default from config)")
@click.option("--seed", type=int, help="Seed of the random search (default from config)")
@click.option(
    "--check-difference",
    is_flag=True,
    help="Also verify t.z != 0 mod M on the difference set (limits from index_sets.*)",
)
@click.option("--no-cache", is_flag=True, help="Neither read nor write the lattice cache")
@click.pass_context
def lattice(ctx, d, N, nonneg, strategy, seed, no_cache, check_difference):
    """Find a reconstructing rank-1 lattice for a hyperbolic cross.

    Prints one JSON record with the lattice and its verification.
    """
    config_manager = ctx.obj["config_manager"]
    cfg = config_manager.config
    strategy = strategy or cfg.lattice.strategy
    seed = cfg.sweep.seed if seed is None else seed

    with translate_errors():
        I = hyperbolic_cross(N, d, nonneg=nonneg, max_cardinality=cfg.index_sets.max_cardinality)
        lat = find_reconstructing_lattice(
            I, strategy, seed=seed, config=cfg.lattice, cache=lattice_cache(config_manager, no_cache)
        )
        verified = is_reconstructing(lat, I)
        difference_ok = (
            check_difference_condition(lat, I, config=cfg.index_sets) if check_difference else None
        )

    record = {
        "d": d,
        "N": N,
        "kind": I.kind.value,
        "card_I": len(I),
        "M": lat.M,
        "z": list(lat.z),
        "strategy": strategy,
        "seed": None if strategy == "cbc" else seed,
        "verified": verified,
    }
    if check_difference:
        record["difference_condition"] = difference_ok
    echo_json(record)


@click.command("index-set")
@click.option("--d", "d", type=click.IntRange(min=1), required=True, help="Dimension")
@click.option("--N", "N", type=click.IntRange(min=1), required=True, help="Hyperbolic cross refinement")
@click.option("--nonneg", is_flag=True, help="Non-negative quadrant only")
@click.option("--count", is_flag=True, help="Only print the cardinality")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write the set to a file")
@click.pass_context
def index_set(ctx, d, N, nonneg, count, out):
    """Enumerate a hyperbolic cross, or count it without enumerating."""
    cfg = ctx.obj["config_manager"].config
    with translate_errors():
        if count:
            click.echo(cross_cardinality(N, d, nonneg))
            return
        I = hyperbolic_cross(N, d, nonneg=nonneg, max_cardinality=cfg.index_sets.max_cardinality)

    if out:
        write_frequency_set(I, out)
        console.print(f"[green]✓[/green] Wrote {len(I):,} indices to {out}")
    else:
        write_frequency_set(I, sys.stdout)


@click.group("cache")
def cache_group():
    """Manage the lattice cache."""
    pass


def _cache(ctx) -> LatticeCache:
    cache = lattice_cache(ctx.obj["config_manager"])
    if cache is None:
        return LatticeCache()
    return cache


@cache_group.command("list")
@click.pass_context
def cache_list(ctx):
    """List cached lattices."""
    cache = _cache(ctx)
    records = cache.records()

    if not records:
        console.print(f"[dim]No cached lattices in {cache.path}.[/dim]")
        return

    table = Table(title=f"Lattice Cache ({cache.path})")
    table.add_column("d", justify="right")
    table.add_column("Set", style="cyan")
    table.add_column("N", justify="right")
    table.add_column("|I|", justify="right")
    table.add_column("M", justify="right", style="yellow")
    table.add_column("z")
    table.add_column("Strategy")
    table.add_column("Seed", justify="right")
    table.add_column("Verified")

    for r in records:
        index_set = r.get("index_set", {})
        table.add_row(
            str(r["d"]),
            str(index_set.get("kind", "?")),
            str(index_set.get("N", "-")),
            str(index_set.get("card", "?")),
            str(r["M"]),
            ", ".join(map(str, r["z"])),
            str(r.get("strategy", "?")),
            "-" if r.get("seed") is None else str(r["seed"]),
            "[green]yes[/green]" if r.get("verified") else "[red]no[/red]",
        )

    console.print(table)


@cache_group.command("export")
@click.argument("destination", type=click.Path(dir_okay=False))
@click.pass_context
def cache_export(ctx, destination):
    """Copy all cache records to DESTINATION."""
    count = _cache(ctx).export(destination)
    console.print(f"[green]✓[/green] Exported {count} record(s) to {destination}")


@cache_group.command("import")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def cache_import(ctx, source):
    """Add records from SOURCE that are not cached yet."""
    added = _cache(ctx).import_records(source)
    console.print(f"[green]✓[/green] Imported {added} new record(s)")


@cache_group.command("clear")
@click.option("--yes", "-y", is_flag=True, help="Do not ask for confirmation")
@click.pass_context
def cache_clear(ctx, yes):
    """Delete the lattice cache file."""
    cache = _cache(ctx)
    if not yes and not Confirm.ask(f"Delete {cache.path}?", default=False):
        console.print("[dim]Cancelled.[/dim]")
        return
    removed = cache.clear()
    console.print(f"[green]✓[/green] Removed {removed} record(s)")
