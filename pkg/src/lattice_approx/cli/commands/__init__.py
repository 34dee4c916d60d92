"""CLI Commands Package."""

from .approx import approx as approx_command
from .approx import cheb_equiv as cheb_equiv_command
from .lattice import cache_group
from .lattice import index_set as index_set_command
from .lattice import lattice as lattice_command
from .sweep import best_eta as best_eta_command
from .sweep import decay as decay_command
from .sweep import reference as reference_command
from .sweep import sweep as sweep_command

__all__ = [
    "lattice_command",
    "index_set_command",
    "cache_group",
    "approx_command",
    "cheb_equiv_command",
    "sweep_command",
    "decay_command",
    "best_eta_command",
    "reference_command",
]
