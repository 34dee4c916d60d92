"""Test configuration for pytest."""

import sys
from pathlib import Path

# Add src to path for testing
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from lattice_approx.core.index_sets import FrequencySet, hyperbolic_cross  # noqa: E402
from lattice_approx.core.lattice import Rank1Lattice, find_reconstructing_lattice  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Keep config and lattice cache files inside the test's temp directory."""
    monkeypatch.setenv("LATTICE_CACHE", str(tmp_path / "lattices.jsonl"))
    monkeypatch.setenv("LATTICE_APPROX_CONFIG", str(tmp_path / "config.yaml"))
    monkeypatch.delenv("LATTICE_APPROX_LOG_LEVEL", raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def cross_2d() -> FrequencySet:
    """Full hyperbolic cross, N=8, d=2."""
    return hyperbolic_cross(8, 2)


@pytest.fixture
def lattice_for():
    """Find (and memoize per test) a reconstructing lattice for a set."""
    found = {}

    def _find(I: FrequencySet, strategy: str = "cbc") -> Rank1Lattice:
        key = (hash(I), strategy)
        if key not in found:
            found[key] = find_reconstructing_lattice(I, strategy, seed=3)
        return found[key]

    return _find


@pytest.fixture
def random_coefficients(rng):
    """Draw n standard normal coefficients, complex unless real=True."""

    def _draw(n: int, real: bool = False) -> np.ndarray:
        values = rng.standard_normal(n)
        if not real:
            values = values + 1j * rng.standard_normal(n)
        return values

    return _draw
