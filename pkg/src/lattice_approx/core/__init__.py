"""Core approximation functionality."""

from .experiments import (
    ExperimentRecord,
    SweepConfig,
    best_eta,
    compare_to_reference,
    decay_table,
    fit_decay_rate,
    read_records,
    relative_error,
    run_sweep,
    uniform_points,
)
from .fourier_core import CoefficientVector, LatticeSamples, dft, evaluate, reconstruct
from .index_sets import FrequencySet, SetKind, difference_set, hc_weight, hnorm, hyperbolic_cross
from .lattice import (
    LatticeCache,
    Rank1Lattice,
    check_difference_condition,
    exact_quadrature,
    find_reconstructing_lattice,
    is_reconstructing,
    lattice_nodes,
)
from .systems import (
    Approximant,
    ApproximationMethod,
    MethodKind,
    SampleCache,
    approximate,
    basis_eval,
    chebyshev_equivalence_check,
    eval_partial_sum,
    load_approximant,
    save_approximant,
    transformed_lattice_nodes,
)
from .testfunctions import B2Tensor, b2_fourier_coefficient, eval_b2, eval_tensor
from .transforms import TransformFamily, TransformKind, WeightFunction, WeightKind

__all__ = [
    "FrequencySet",
    "SetKind",
    "hyperbolic_cross",
    "difference_set",
    "hc_weight",
    "hnorm",
    "Rank1Lattice",
    "LatticeCache",
    "lattice_nodes",
    "is_reconstructing",
    "check_difference_condition",
    "find_reconstructing_lattice",
    "exact_quadrature",
    "TransformFamily",
    "TransformKind",
    "WeightFunction",
    "WeightKind",
    "CoefficientVector",
    "LatticeSamples",
    "dft",
    "evaluate",
    "reconstruct",
    "ApproximationMethod",
    "Approximant",
    "MethodKind",
    "SampleCache",
    "approximate",
    "basis_eval",
    "eval_partial_sum",
    "transformed_lattice_nodes",
    "chebyshev_equivalence_check",
    "save_approximant",
    "load_approximant",
    "B2Tensor",
    "eval_b2",
    "eval_tensor",
    "b2_fourier_coefficient",
    "ExperimentRecord",
    "SweepConfig",
    "relative_error",
    "uniform_points",
    "run_sweep",
    "read_records",
    "fit_decay_rate",
    "decay_table",
    "best_eta",
    "compare_to_reference",
]
