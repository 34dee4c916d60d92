"""Single-approximation commands."""

import sys

import click
import numpy as np

from ...core.experiments import evaluate_method, points_digest, uniform_points
from ...core.lattice import STRATEGIES, find_reconstructing_lattice
from ...core.systems import (
    ApproximationMethod,
    chebyshev_equivalence_check,
    save_approximant,
    set_threads,
)
from ..error_handling import EXIT_NUMERICAL_FAILURE, translate_errors
from ..utils import console, echo_json, err_console, get_function, lattice_cache

EQUIVALENCE_TOLERANCE = 1e-10


@click.command("approx")
@click.option("--method", "-m", required=True, help="Method spec, e.g. cheb or erf:eta=2.5")
@click.option("--d", "d", type=click.IntRange(min=1), required=True, help="Dimension")
@click.option("--N", "N", type=click.IntRange(min=1), required=True, help="Hyperbolic cross refinement")
@click.option("--function", "function", default="b2", show_default=True, help="Test function")
@click.option("--R", "R", type=click.IntRange(min=1), help="Evaluation points (default from config)")
@click.option("--seed", type=int, help="Seed for points and lattice search (default from config)")
@click.option("--strategy", type=click.Choice(STRATEGIES), help="Lattice search strategy")
@click.option("--weighted-inf", is_flag=True, help="Report the weighted max error for transformed methods")
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads for evaluation")
@click.option("--save", "save_path", type=click.Path(dir_okay=False), help="Write the approximant")
@click.option("--no-cache", is_flag=True, help="Neither read nor write the lattice cache")
@click.pass_context
def approx(ctx, method, d, N, function, R, seed, strategy, weighted_inf, threads, save_path, no_cache):
    """Approximate a test function once and print the error record as JSON."""
    config_manager = ctx.obj["config_manager"]
    cfg = config_manager.config
    R = R or cfg.sweep.R
    seed = cfg.sweep.seed if seed is None else seed
    strategy = strategy or cfg.lattice.strategy
    set_threads(threads or cfg.sweep.threads)
    h = get_function(function, d)

    with translate_errors():
        spec = ApproximationMethod.parse(method, d)
        I = spec.frequency_set(N, cfg.index_sets.max_cardinality)
        lat = find_reconstructing_lattice(
            spec.lattice_set(I),
            strategy,
            seed=seed,
            config=cfg.lattice,
            cache=lattice_cache(config_manager, no_cache),
        )
        points = uniform_points(R, d, seed, cfg.sweep.boundary_margin)
        base = dict(
            method=spec.label(),
            d=d,
            N=N,
            M=lat.M,
            z=lat.z,
            eta=spec.eta,
            R=R,
            seed=seed,
            points_sha256=points_digest(points),
        )
        record, approximant = evaluate_method(
            spec,
            N,
            h,
            lat,
            points,
            np.asarray(h(points)),
            base,
            weighted_inf=weighted_inf,
            max_cardinality=cfg.index_sets.max_cardinality,
        )

    if save_path:
        save_approximant(approximant, save_path)
        err_console.print(f"[green]✓[/green] Saved approximant to {save_path}", highlight=False)
    echo_json(record.to_dict())


def equivalence_grid(size: int) -> np.ndarray:
    """`size` equispaced interior points (i + 1) / (size + 1)."""
    return (np.arange(size) + 1.0) / (size + 1.0)


@click.command("cheb-equiv")
@click.option("--N", "N", type=click.IntRange(min=0), default=16, show_default=True, help="Largest degree")
@click.option("--grid", type=click.IntRange(min=1), default=101, show_default=True, help="Grid points")
def cheb_equiv(N, grid):
    """Check that the Chebyshev-transformed Fourier system reproduces T_k.

    Exits 0 when the largest deviation is at most 1e-10.
    """
    with translate_errors():
        deviation = chebyshev_equivalence_check(N, equivalence_grid(grid))

    ok = deviation <= EQUIVALENCE_TOLERANCE
    style = "green" if ok else "red"
    console.print(
        f"max |combined - T_k| over k <= {N}, {grid} point(s): [{style}]{deviation:.3e}[/{style}]"
    )
    if not ok:
        sys.exit(EXIT_NUMERICAL_FAILURE)
