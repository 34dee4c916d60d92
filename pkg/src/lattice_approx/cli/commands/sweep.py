"""Sweep, decay-rate and reference commands."""

import sys
from pathlib import Path

import click
from rich.table import Table

from ...core.exceptions import PreconditionError
from ...core.experiments import (
    DEFAULT_METHODS,
    ExperimentRecord,
    SweepConfig,
    best_eta as find_best_eta,
    compare_to_reference,
    decay_table,
    read_records,
    run_sweep,
)
from ...core.lattice import STRATEGIES
from ...core.reference import load_reference
from ...core.systems import format_eta, set_threads
from ..error_handling import EXIT_NUMERICAL_FAILURE, translate_errors
from ..utils import (
    FloatList,
    NRange,
    Window,
    console,
    format_error,
    get_function,
    lattice_cache,
    split_list,
)


def _load(path: str):
    try:
        return read_records(path)
    except (OSError, UnicodeDecodeError, PreconditionError) as e:
        raise click.BadParameter(str(e), param_hint="RECORDS")


def _summary_line(record: ExperimentRecord) -> str:
    if not record.ok:
        return f"{record.method:<16} N={record.N:>4}  [red]failed[/red]: {record.error}"
    epsinf = "undefined" if record.epsinf_undefined else format_error(
        record.epsinf_weighted if record.epsinf_weighted is not None else record.epsinf
    )
    return (
        f"{record.method:<16} N={record.N:>4}  |I|={record.card_I:<8} M={record.M:<10} "
        f"eps2={record.eps2:.4e}  epsinf={epsinf}"
    )


@click.command("sweep")
@click.option("--d", "d", type=click.IntRange(min=1), required=True, help="Dimension")
@click.option(
    "--methods",
    default=",".join(DEFAULT_METHODS),
    show_default=True,
    help="Comma-separated method specs; log/erf without eta expand over --etas",
)
@click.option("--N", "N_values", type=NRange(), required=True, help="N values, e.g. 1..140 or 1..81:2")
@click.option("--etas", type=FloatList(), default="2,2.5,4", show_default=True, help="Default eta list")
@click.option(
    "--eta-grid",
    type=click.Choice(["default", "fine"]),
    default="default",
    show_default=True,
    help="'fine' sweeps eta over 2, 2.1, ..., 3.9, 4 instead of --etas",
)
@click.option("--R", "R", type=click.IntRange(min=1), help="Evaluation points (default from config)")
@click.option("--seed", type=int, help="Run seed (default from config)")
@click.option("--strategy", type=click.Choice(STRATEGIES), help="Lattice search strategy")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Output file")
@click.option("--csv", "as_csv", is_flag=True, help="Write CSV")
@click.option("--json", "as_json", is_flag=True, help="Write JSON lines")
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads (default: all cores)")
@click.option("--weighted-inf", is_flag=True, help="Weighted max error for transformed methods")
@click.option("--timing", is_flag=True, help="Fill the wall_ms column (output is then not reproducible)")
@click.option("--function", "function", default="b2", show_default=True, help="Test function")
@click.option("--no-cache", is_flag=True, help="Neither read nor write the lattice cache")
@click.pass_context
def sweep(
    ctx,
    d,
    methods,
    N_values,
    etas,
    eta_grid,
    R,
    seed,
    strategy,
    out,
    as_csv,
    as_json,
    threads,
    weighted_inf,
    timing,
    function,
    no_cache,
):
    """Run every method over a range of N and record the errors.

    Records are written as they finish; one summary line per record is printed.
    """
    config_manager = ctx.obj["config_manager"]
    cfg = config_manager.config
    if as_csv and as_json:
        raise click.UsageError("--csv and --json are mutually exclusive")
    fmt = "json" if as_json else "csv" if as_csv else cfg.sweep.format
    out = out or f"sweep-d{d}.{'jsonl' if fmt == 'json' else 'csv'}"
    h = get_function(function, d)
    set_threads(threads or cfg.sweep.threads)

    with translate_errors():
        sweep_cfg = SweepConfig(
            methods=split_list(methods),
            d=d,
            N_values=N_values,
            etas=etas,
            eta_grid=eta_grid,
            R=R or cfg.sweep.R,
            seed=cfg.sweep.seed if seed is None else seed,
            strategy=strategy or cfg.lattice.strategy,
            output=out,
            format=fmt,
            threads=threads,
            weighted_inf=weighted_inf,
            timing=timing,
            function=function,
            boundary_margin=cfg.sweep.boundary_margin,
        )
        records = run_sweep(
            sweep_cfg,
            h=h,
            cache=lattice_cache(config_manager, no_cache),
            on_record=lambda r: console.print(_summary_line(r), highlight=False),
            config=cfg,
        )

    succeeded = sum(1 for r in records if r.ok)
    console.print(f"[green]✓[/green] {succeeded}/{len(records)} record(s) written to {out}")
    if succeeded == 0:
        sys.exit(EXIT_NUMERICAL_FAILURE)


@click.command("decay")
@click.argument("records_path", metavar="RECORDS", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", type=Window(), help="Inclusive N window a..b (default: upper half)")
@click.option("--compare", is_flag=True, help="Show the reference rates next to the fit")
def decay(records_path, window, compare):
    """Fit eps2 ~ c N^r per method and print the rates."""
    records = _load(records_path)
    with translate_errors():
        fits = decay_table(records, window)

    reference = load_reference() if compare else None
    table = Table(title=f"Decay rates ({Path(records_path).name})")
    table.add_column("Method", style="cyan")
    table.add_column("d", justify="right")
    table.add_column("Rate", justify="right", style="yellow")
    table.add_column("Points", justify="right")
    table.add_column("Window", justify="right")
    if compare:
        table.add_column("Reference", justify="right")
        table.add_column("Diff", justify="right")

    for fit in fits:
        rate = "-" if fit.rate is None else f"{fit.rate:.2f}"
        row = [fit.method, str(fit.d), rate, str(fit.points), f"{fit.window[0]}..{fit.window[1]}"]
        if compare:
            ref = reference.rate(fit.method)
            row.append("-" if ref is None else f"{ref:.2f}")
            row.append("-" if ref is None or fit.rate is None else f"{fit.rate - ref:+.2f}")
        table.add_row(*row)

    console.print(table)


@click.command("best-eta")
@click.argument("records_path", metavar="RECORDS", type=click.Path(exists=True, dir_okay=False))
def best_eta(records_path):
    """Report the eta with the smallest error per transform family."""
    results = find_best_eta(_load(records_path))
    if not results:
        console.print("[dim]No log/erf records with an eta found.[/dim]")
        return

    table = Table(title="Best eta at the largest common N")
    table.add_column("Family", style="cyan")
    table.add_column("Best eta", style="green", justify="right")
    table.add_column("N", justify="right")
    table.add_column("eps2", justify="right")
    table.add_column("All candidates")
    for r in results:
        candidates = ", ".join(f"{format_eta(e)}: {v:.2e}" for e, v in r.candidates.items())
        table.add_row(r.family, format_eta(r.eta), str(r.N), f"{r.eps2:.4e}", candidates)
    console.print(table)


@click.command("reference")
@click.option("--d", "d", type=int, help="Only this dimension")
@click.option(
    "--compare",
    "compare_path",
    type=click.Path(exists=True, dir_okay=False),
    help="Sweep records to compare against the reference values",
)
def reference(d, compare_path):
    """Print the bundled reference errors and decay rates."""
    data = load_reference()

    if compare_path:
        rows = compare_to_reference(_load(compare_path), data)
        if not rows:
            console.print("[dim]No record matches a reference (method, d, N).[/dim]")
            return
        table = Table(title="Records vs reference")
        for column in ("Method", "d", "N", "eps2", "Reference", "Ratio"):
            table.add_column(column, justify="left" if column == "Method" else "right")
        for row in rows:
            table.add_row(
                row.method,
                str(row.d),
                str(row.N),
                f"{row.eps2:.4e}",
                f"{row.reference:.4e}",
                f"{row.ratio:.2f}",
            )
        console.print(table)
        return

    for dim in data.dims():
        if d is not None and dim != d:
            continue
        methods = data.methods(dim)
        Ns = sorted({N for m in methods for N in data.eps2[dim][m]})
        table = Table(title=f"Reference eps2, d={dim}")
        table.add_column("Method", style="cyan")
        for N in Ns:
            table.add_column(f"N={N}", justify="right")
        for m in methods:
            table.add_row(m, *[format_error(data.value(dim, m, N)) for N in Ns])
        console.print(table)

    rates = Table(title="Reference decay rates (d=1)")
    rates.add_column("Method", style="cyan")
    rates.add_column("Rate", justify="right", style="yellow")
    for m, r in data.decay_rates.items():
        rates.add_row(m, f"{r:.2f}")
    console.print(rates)
