r"""
Hyperbolic cross frequency sets.

The hyperbolic cross of refinement $N$ in dimension $d$ is

    I_N^d = { k in Z^d : prod_l max(1, |k_l|) <= N },

optionally restricted to the non-negative quadrant. Sets are stored as
lexicographically sorted `(n, d)` int64 arrays so every coefficient vector
built on them has a reproducible order.

Enumeration walks the coordinates depth-first with the remaining budget
N / prod max(1, |k_j|), so the cost is proportional to |I_N^d| rather than to
the bounding box (2N + 1)^d.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterable, Optional, TextIO, Tuple, Union

import numpy as np
from numba import njit

from .exceptions import PreconditionError, ResourceLimitError

if TYPE_CHECKING:
    from .fourier_core import CoefficientVector

logger = logging.getLogger(__name__)

DEFAULT_MAX_CARDINALITY = 10**8
DEFAULT_MAX_PAIRS = 10**9


class SetKind(str, Enum):
    """How a frequency set was produced."""

    FULL_CROSS = "full-cross"
    NONNEG_CROSS = "nonneg-cross"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Ordered, duplicate-free set of integer frequency vectors."""

    indices: np.ndarray
    kind: SetKind = SetKind.CUSTOM
    N: Optional[int] = None

    def __post_init__(self):
        arr = np.asarray(self.indices, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise PreconditionError(f"Frequency indices must have shape (n, d), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "indices", arr)
        object.__setattr__(self, "kind", SetKind(self.kind))
        if self.kind == SetKind.NONNEG_CROSS and arr.size and arr.min() < 0:
            raise PreconditionError("nonneg-cross sets must have non-negative components")

    @classmethod
    def from_indices(
        cls,
        indices: Iterable[Iterable[int]],
        kind: SetKind = SetKind.CUSTOM,
        N: Optional[int] = None,
    ) -> "FrequencySet":
        """Build a set from arbitrary rows, sorting and dropping duplicates."""
        if not isinstance(indices, np.ndarray):
            indices = [list(row) for row in indices]
        arr = np.asarray(indices, dtype=np.int64)
        if arr.size == 0:
            raise PreconditionError("Frequency set must contain at least one index")
        arr = np.atleast_2d(arr)
        # np.unique with axis=0 sorts rows lexicographically
        return cls(np.unique(arr, axis=0), kind=kind, N=N)

    @property
    def dim(self) -> int:
        return int(self.indices.shape[1])

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.indices)

    def __contains__(self, k) -> bool:
        return tuple(int(v) for v in np.ravel(k)) in self.positions

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencySet):
            return NotImplemented
        return self.indices.shape == other.indices.shape and bool(
            np.array_equal(self.indices, other.indices)
        )

    def __hash__(self) -> int:
        return hash((self.indices.shape, self.indices.tobytes()))

    @cached_property
    def positions(self) -> Dict[Tuple[int, ...], int]:
        """Map from index tuple to its row in `indices`."""
        return {tuple(int(v) for v in row): i for i, row in enumerate(self.indices)}

    def position(self, k) -> int:
        """Row of frequency `k`; KeyError if absent."""
        return self.positions[tuple(int(v) for v in np.ravel(k))]

    @property
    def is_nonneg(self) -> bool:
        return bool(self.indices.min() >= 0)

    @property
    def descriptor(self) -> Dict[str, object]:
        """Compact description used in lattice cache records."""
        digest = hashlib.sha256(self.indices.tobytes()).hexdigest()[:16]
        return {
            "kind": self.kind.value,
            "d": self.dim,
            "N": self.N,
            "card": len(self),
            "digest": digest,
        }

    def symmetrized(self) -> "FrequencySet":
        """All sign mirrors of the set, I together with every (±k_1, ..., ±k_d)."""
        signs = np.array(list(product((1, -1), repeat=self.dim)), dtype=np.int64)
        mirrored = (self.indices[None, :, :] * signs[:, None, :]).reshape(-1, self.dim)
        kind = SetKind.FULL_CROSS if self.kind != SetKind.CUSTOM else SetKind.CUSTOM
        return FrequencySet.from_indices(mirrored, kind=kind, N=self.N)


def hc_weight(k) -> Union[int, np.ndarray]:
    """Hyperbolic weight prod_l max(1, |k_l|).

    A single index returns an int, an `(n, d)` array returns one weight per row.
    """
    arr = np.asarray(k, dtype=np.int64)
    weights = np.prod(np.maximum(1, np.abs(arr)), axis=-1)
    if arr.ndim <= 1:
        return int(weights)
    return weights


@njit(cache=True)
def _cross_cardinality(N, d, nonneg, cap):
    # depth-first over the first d-1 coordinates; the last one is counted in closed form
    budgets = np.empty(d, dtype=np.int64)
    current = np.empty(d, dtype=np.int64)
    budgets[0] = N
    current[0] = 0 if nonneg else -N
    level = 0
    count = 0
    while level >= 0:
        b = budgets[level]
        if level == d - 1:
            count += b + 1 if nonneg else 2 * b + 1
            if count > cap:
                return count
            level -= 1
            if level >= 0:
                current[level] += 1
            continue
        k = current[level]
        if k > b:
            level -= 1
            if level >= 0:
                current[level] += 1
            continue
        budgets[level + 1] = b // max(1, abs(k))
        current[level + 1] = 0 if nonneg else -budgets[level + 1]
        level += 1
    return count


@njit(cache=True)
def _fill_cross(N, d, nonneg, out):
    budgets = np.empty(d, dtype=np.int64)
    current = np.empty(d, dtype=np.int64)
    budgets[0] = N
    current[0] = 0 if nonneg else -N
    level = 0
    row = 0
    while level >= 0:
        b = budgets[level]
        k = current[level]
        if k > b:
            level -= 1
            if level >= 0:
                current[level] += 1
            continue
        if level == d - 1:
            out[row, :] = current
            row += 1
            current[level] += 1
            continue
        budgets[level + 1] = b // max(1, abs(k))
        current[level + 1] = 0 if nonneg else -budgets[level + 1]
        level += 1
    return row


def cross_cardinality(N: int, d: int, nonneg: bool = False, cap: Optional[int] = None) -> int:
    """Size of the hyperbolic cross without materializing it.

    Counting stops once `cap` is exceeded; the returned value is then just
    some number larger than `cap`.
    """
    if N < 1 or d < 1:
        raise PreconditionError(f"Hyperbolic cross needs N >= 1 and d >= 1, got N={N}, d={d}")
    limit = np.iinfo(np.int64).max if cap is None else int(cap)
    return int(_cross_cardinality(int(N), int(d), bool(nonneg), limit))


def hyperbolic_cross(
    N: int,
    d: int,
    nonneg: bool = False,
    max_cardinality: int = DEFAULT_MAX_CARDINALITY,
) -> FrequencySet:
    """Enumerate the hyperbolic cross I_N^d (or its non-negative quadrant).

    Rows come out of the depth-first walk already in lexicographic order.

    Raises:
        ResourceLimitError: if the set would hold more than `max_cardinality` indices.
    """
    size = cross_cardinality(N, d, nonneg, cap=max_cardinality)
    if size > max_cardinality:
        raise ResourceLimitError(f"hyperbolic cross (N={N}, d={d})", size, max_cardinality)

    out = np.empty((size, d), dtype=np.int64)
    filled = _fill_cross(int(N), int(d), bool(nonneg), out)
    assert filled == size
    kind = SetKind.NONNEG_CROSS if nonneg else SetKind.FULL_CROSS
    logger.debug(f"Enumerated {kind.value} N={N} d={d}: {size} indices")
    return FrequencySet(out, kind=kind, N=N)


def difference_set(I: FrequencySet, max_pairs: int = DEFAULT_MAX_PAIRS) -> FrequencySet:
    """D(I) = {k1 - k2 : k1, k2 in I}, sorted and duplicate-free.

    Pairs are formed in row blocks and de-duplicated per block to bound memory.
    """
    n = len(I)
    if n * n > max_pairs:
        raise ResourceLimitError("difference set pair enumeration", n * n, max_pairs)

    block = max(1, min(n, 2_000_000 // max(n, 1)))
    parts = []
    for start in range(0, n, block):
        rows = I.indices[start : start + block]
        diffs = (rows[:, None, :] - I.indices[None, :, :]).reshape(-1, I.dim)
        parts.append(np.unique(diffs, axis=0))
    return FrequencySet.from_indices(np.concatenate(parts), kind=SetKind.CUSTOM)


def hnorm(coeffs: "CoefficientVector", beta: float) -> float:
    """Truncated H^beta norm (sum_k hc_weight(k)^(2 beta) |c_k|^2)^(1/2) over the support."""
    if beta < 0:
        raise PreconditionError(f"beta must be non-negative, got {beta}")
    values = np.asarray(coeffs.values)
    if not np.all(np.isfinite(values)):
        raise PreconditionError("hnorm needs finite coefficients")
    weights = hc_weight(coeffs.support.indices).astype(np.float64)
    return float(np.sqrt(np.sum(weights ** (2.0 * beta) * np.abs(values) ** 2)))


def write_frequency_set(I: FrequencySet, target: Union[str, Path, TextIO]) -> None:
    """Write `I` in the line format: header `d N kind`, then one index per line."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as f:
            write_frequency_set(I, f)
        return
    n_field = "-" if I.N is None else str(I.N)
    target.write(f"{I.dim} {n_field} {I.kind.value}\n")
    for row in I.indices:
        target.write(" ".join(str(int(v)) for v in row))
        target.write("\n")


def read_frequency_set(source: Union[str, Path, TextIO]) -> FrequencySet:
    """Read a set written by `write_frequency_set`."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as f:
            return read_frequency_set(f)

    header = source.readline().split()
    if len(header) != 3:
        raise PreconditionError(f"Malformed frequency set header: {' '.join(header)!r}")
    d = int(header[0])
    N = None if header[1] == "-" else int(header[1])
    kind = SetKind(header[2])
    rows = [list(map(int, line.split())) for line in source if line.strip()]
    if any(len(row) != d for row in rows):
        raise PreconditionError(f"Every index line must have {d} integers")
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, d)
    return FrequencySet.from_indices(arr, kind=kind, N=N)
