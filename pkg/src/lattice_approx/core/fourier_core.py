"""
Lattice DFT kernels: evaluate and reconstruct trigonometric polynomials on
rank-1 lattices with one length-M FFT.

On a lattice every frequency k only enters through its bin b(k) = k.z mod M,
since exp(2 pi i k.x_j) = exp(2 pi i j b(k) / M). Evaluation scatters the
coefficients into their bins (colliding frequencies add up) and applies one
inverse DFT; reconstruction applies one forward DFT and gathers the bins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.fft

from .exceptions import PreconditionError
from .index_sets import FrequencySet
from .lattice import Rank1Lattice, is_reconstructing, lattice_bins

logger = logging.getLogger(__name__)

COEFFICIENT_DTYPE = np.dtype("<c16")


@dataclass(eq=False)
class CoefficientVector:
    """Coefficients aligned with the order of `support`."""

    support: FrequencySet
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).ravel()
        if values.shape[0] != len(self.support):
            raise PreconditionError(
                f"{values.shape[0]} coefficient values for a support of size {len(self.support)}"
            )
        if not np.all(np.isfinite(values)):
            raise PreconditionError("Coefficient values must be finite")
        self.values = values

    @classmethod
    def zeros(cls, support: FrequencySet) -> "CoefficientVector":
        return cls(support, np.zeros(len(support), dtype=np.complex128))

    @classmethod
    def unit(cls, support: FrequencySet, k) -> "CoefficientVector":
        """Vector with a single 1 at frequency `k`."""
        values = np.zeros(len(support), dtype=np.complex128)
        values[support.position(k)] = 1.0
        return cls(support, values)

    def __getitem__(self, k) -> complex:
        return complex(self.values[self.support.position(k)])

    def __len__(self) -> int:
        return len(self.support)

    def to_bytes(self) -> bytes:
        """Values as little-endian complex128."""
        return self.values.astype(COEFFICIENT_DTYPE).tobytes()

    @classmethod
    def from_bytes(cls, support: FrequencySet, data: bytes) -> "CoefficientVector":
        values = np.frombuffer(data, dtype=COEFFICIENT_DTYPE)
        return cls(support, values.astype(np.complex128))


@dataclass(eq=False)
class LatticeSamples:
    """Function values at the M nodes of `lattice`, in node order."""

    lattice: Rank1Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).ravel()
        if values.shape[0] != self.lattice.M:
            raise PreconditionError(
                f"{values.shape[0]} samples for a lattice of size M={self.lattice.M}"
            )
        self.values = values


def dft(values, direction: Literal["forward", "inverse"] = "forward") -> np.ndarray:
    """Length-M DFT for any M.

    forward: X_b = sum_j v_j exp(-2 pi i j b / M)  (unnormalized)
    inverse: v_j = (1/M) sum_b X_b exp(+2 pi i j b / M)

    pocketfft (scipy.fft) handles arbitrary lengths via mixed-radix
    factorization with a Bluestein fallback for large prime factors. Real
    input stays real, so its spectrum comes out exactly Hermitian.
    """
    arr = np.asarray(values)
    arr = arr.astype(np.float64 if np.isrealobj(arr) else np.complex128, copy=False)
    if arr.ndim != 1 or arr.size < 1:
        raise PreconditionError("dft expects a non-empty one-dimensional array")
    if direction == "forward":
        return scipy.fft.fft(arr)
    if direction == "inverse":
        return scipy.fft.ifft(arr)
    raise PreconditionError(f"Unknown DFT direction '{direction}'")


def evaluate(coeffs: CoefficientVector, lat: Rank1Lattice) -> LatticeSamples:
    """h(x_j) = sum_k c_k exp(2 pi i k.x_j) at every lattice node.

    Frequencies sharing a bin are summed, which is exactly the aliasing a
    non-reconstructing lattice produces.
    """
    bins = lattice_bins(coeffs.support.indices, lat).astype(np.int64)
    spectrum = np.zeros(lat.M, dtype=np.complex128)
    np.add.at(spectrum, bins, coeffs.values)
    return LatticeSamples(lat, lat.M * dft(spectrum, "inverse"))


def reconstruct(
    samples: LatticeSamples, I: FrequencySet, trusted: bool = False
) -> CoefficientVector:
    """c_k = (1/M) sum_j h(x_j) exp(-2 pi i k.x_j) for every k in I.

    Args:
        samples: values at the lattice nodes
        I: frequencies to reconstruct
        trusted: skip the O(|I|) reconstruction check (the caller already verified
            the lattice, or wants the aliased sums on purpose)

    Raises:
        PreconditionError: if not trusted and the lattice is not reconstructing for I.
    """
    lat = samples.lattice
    if not trusted and not is_reconstructing(lat, I):
        raise PreconditionError(f"{lat} is not reconstructing for the frequency set (|I|={len(I)})")
    spectrum = dft(samples.values, "forward") / lat.M
    bins = lattice_bins(I.indices, lat).astype(np.int64)
    return CoefficientVector(I, spectrum[bins])
