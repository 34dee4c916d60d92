"""
Lattice Approx - approximation on the unit cube with rank-1 lattices

Approximates non-periodic functions on [0,1]^d from samples along
reconstructing rank-1 lattices, with four orthonormal systems: Fourier,
cosine (tent-transformed), Chebyshev and transformed Fourier (logarithmic or
error-function torus-to-cube maps).

Quick Start:
    >>> from lattice_approx import ApproximationMethod, B2Tensor, hyperbolic_cross
    >>> from lattice_approx import approximate, find_reconstructing_lattice
    >>> method = ApproximationMethod.parse("cheb", dim=1)
    >>> I = method.frequency_set(49)
    >>> lat = find_reconstructing_lattice(method.lattice_set(I))
    >>> approx = approximate(method, B2Tensor(1), I, lat)

Features:
    - Hyperbolic cross frequency sets and reconstructing lattice search
    - One-FFT coefficient computation for all four systems
    - Seeded, reproducible error sweeps with CSV/JSON output
    - Decay-rate fits and bundled reference values
    - CLI and Python API

Configuration:
    Settings are read from (first found):
    1. --config / LATTICE_APPROX_CONFIG
    2. ./lattice-approx.yaml
    3. .workspace-config/lattice-approx/config.yaml or ~/.config/lattice-approx/config.yaml
    LATTICE_CACHE overrides the lattice cache location.
"""

__version__ = "1.0.0"
__license__ = "MIT"

# Import config module to trigger .env loading
from .core import config  # noqa: F401
from .core.exceptions import ApproximationError
from .core.experiments import SweepConfig, fit_decay_rate, relative_error, run_sweep
from .core.index_sets import FrequencySet, hyperbolic_cross
from .core.lattice import Rank1Lattice, find_reconstructing_lattice, is_reconstructing
from .core.systems import (
    Approximant,
    ApproximationMethod,
    approximate,
    basis_eval,
    chebyshev_equivalence_check,
    eval_partial_sum,
)
from .core.testfunctions import B2Tensor, get_test_function
from .core.transforms import TransformKind, WeightFunction

__all__ = [
    # Frequency sets and lattices
    "FrequencySet",
    "hyperbolic_cross",
    "Rank1Lattice",
    "find_reconstructing_lattice",
    "is_reconstructing",
    # Systems
    "ApproximationMethod",
    "Approximant",
    "TransformKind",
    "WeightFunction",
    "approximate",
    "basis_eval",
    "eval_partial_sum",
    "chebyshev_equivalence_check",
    # Experiments
    "B2Tensor",
    "get_test_function",
    "SweepConfig",
    "run_sweep",
    "relative_error",
    "fit_decay_rate",
    # Errors
    "ApproximationError",
]
