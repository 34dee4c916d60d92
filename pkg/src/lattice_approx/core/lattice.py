"""
Rank-1 lattices: nodes, the reconstruction property, and lattice search.

A rank-1 lattice with generating vector z and size M has nodes
x_j = (j z mod M) / M, j = 0..M-1. It is reconstructing for a frequency set I
when k -> k.z mod M is injective on I, which is equivalent to t.z != 0 (mod M)
for every nonzero t in the difference set D(I).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.paths import get_cache_path
from .config import IndexSetConfig, LatticeConfig
from .exceptions import PreconditionError, SearchExhaustedError
from .index_sets import FrequencySet, difference_set
from .streams import named_generator

logger = logging.getLogger(__name__)

STRATEGIES = ("grow-M-random-z", "cbc")

# Largest modulus for which (M - 1) + (M - 1)**2 fits in int64.
_INT64_SAFE_MODULUS = 3_000_000_000


@dataclass(frozen=True)
class Rank1Lattice:
    """Generating vector `z` and lattice size `M`."""

    z: Tuple[int, ...]
    M: int

    def __post_init__(self):
        z = tuple(int(v) for v in np.ravel(self.z))
        if not z:
            raise PreconditionError("Generating vector must have at least one component")
        if int(self.M) < 1:
            raise PreconditionError(f"Lattice size M must be >= 1, got {self.M}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "M", int(self.M))

    @property
    def dim(self) -> int:
        return len(self.z)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.dim, "M": self.M, "z": list(self.z)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Rank1Lattice":
        return cls(z=tuple(data["z"]), M=data["M"])

    def __str__(self) -> str:
        return f"Rank1Lattice(z=({', '.join(map(str, self.z))}), M={self.M})"


def lattice_nodes(lat: Rank1Lattice) -> np.ndarray:
    """All M nodes as an `(M, d)` array in [0, 1)^d.

    `j * z_l mod M` is formed in exact integer arithmetic before dividing by M.
    """
    j = np.arange(lat.M, dtype=np.int64)
    if lat.M <= _INT64_SAFE_MODULUS:
        zm = np.mod(np.asarray(lat.z, dtype=np.int64), lat.M)
        residues = np.mod(j[:, None] * zm[None, :], lat.M)
    else:
        zm = np.array([v % lat.M for v in lat.z], dtype=object)
        residues = np.mod(j.astype(object)[:, None] * zm[None, :], lat.M)
    return residues.astype(np.float64) / lat.M


def lattice_bins(K: np.ndarray, lat: Rank1Lattice) -> np.ndarray:
    """Bin `k.z mod M` of every row of `K`.

    Accumulates one coordinate at a time and reduces mod M after each step, so
    intermediate values stay below M**2. Very large M falls back to Python ints.
    """
    K = np.asarray(K, dtype=np.int64)
    if K.ndim != 2 or K.shape[1] != lat.dim:
        raise PreconditionError(
            f"Frequencies of dimension {K.shape[-1]} do not match lattice dimension {lat.dim}"
        )
    M = lat.M
    if M <= _INT64_SAFE_MODULUS:
        zm = np.mod(np.asarray(lat.z, dtype=np.int64), M)
        Km = np.mod(K, M)
        acc = np.zeros(K.shape[0], dtype=np.int64)
        for ell in range(lat.dim):
            acc = np.mod(acc + Km[:, ell] * zm[ell], M)
        return acc
    acc = K.astype(object) @ np.array(lat.z, dtype=object)
    return np.array([int(v) % M for v in acc], dtype=object)


def _is_injective(bins: np.ndarray) -> bool:
    return np.unique(bins).size == bins.size


def is_reconstructing(lat: Rank1Lattice, I: FrequencySet) -> bool:
    """True iff k -> k.z mod M is injective on I."""
    if I.dim != lat.dim:
        raise PreconditionError(f"Frequency set dimension {I.dim} != lattice dimension {lat.dim}")
    if len(I) > lat.M:
        return False
    return _is_injective(lattice_bins(I.indices, lat))


def check_difference_condition(
    lat: Rank1Lattice,
    I: FrequencySet,
    onthefly_threshold: Optional[int] = None,
    max_pairs: Optional[int] = None,
    config: Optional[IndexSetConfig] = None,
) -> bool:
    """Check t.z != 0 (mod M) for every nonzero t in D(I) directly.

    Sets with at most `onthefly_threshold` elements materialize D(I), subject
    to the `max_pairs` cap; larger ones iterate over the pairs row block by row
    block without building the difference set. Unset limits come from `config`.

    Raises:
        ResourceLimitError: when materializing D(I) would exceed `max_pairs`.
    """
    if I.dim != lat.dim:
        raise PreconditionError(f"Frequency set dimension {I.dim} != lattice dimension {lat.dim}")
    config = config or IndexSetConfig()
    if onthefly_threshold is None:
        onthefly_threshold = config.onthefly_threshold
    if max_pairs is None:
        max_pairs = config.max_pairs

    if len(I) <= onthefly_threshold:
        D = difference_set(I, max_pairs=max_pairs)
        nonzero = np.any(D.indices != 0, axis=1)
        return not bool(np.any(lattice_bins(D.indices[nonzero], lat) == 0))

    block = max(1, 2_000_000 // len(I))
    for start in range(0, len(I), block):
        rows = I.indices[start : start + block]
        diffs = (rows[:, None, :] - I.indices[None, :, :]).reshape(-1, I.dim)
        nonzero = np.any(diffs != 0, axis=1)
        if np.any(lattice_bins(diffs[nonzero], lat) == 0):
            return False
    return True


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    candidate = max(2, int(n))
    while not is_prime(candidate):
        candidate += 1
    return candidate


def _search_random(I: FrequencySet, seed: int, config: LatticeConfig) -> Rank1Lattice:
    rng = named_generator(seed, "lattice")
    d = I.dim
    M = next_prime(len(I))
    for attempt in range(config.max_attempts):
        if d == 1:
            draws = np.ones((1, 1), dtype=np.int64)
        else:
            tail = rng.integers(1, max(M, 2), size=(config.draws_per_size, d - 1))
            draws = np.hstack([np.ones((config.draws_per_size, 1), dtype=np.int64), tail])
        # lowest-index success wins, so results do not depend on evaluation order
        for row in draws:
            lat = Rank1Lattice(tuple(int(v) for v in row), M)
            if _is_injective(lattice_bins(I.indices, lat)):
                logger.debug(f"grow-M-random-z: found {lat} after {attempt + 1} size step(s)")
                return lat
        logger.debug(f"grow-M-random-z: no z for M={M}")
        M = next_prime(int(math.ceil(M * config.growth_factor)))
    raise SearchExhaustedError("grow-M-random-z", config.max_attempts, M)


def _search_cbc(I: FrequencySet, config: LatticeConfig) -> Rank1Lattice:
    K = I.indices
    d = I.dim
    if d == 1:
        # z = 1 with the smallest injective M is minimal over all 1-D lattices
        span = int(K.max() - K.min())
        for M in range(len(I), span + 2):
            if _is_injective(np.mod(K[:, 0], M)):
                return Rank1Lattice((1,), M)
        return Rank1Lattice((1,), span + 1)

    M = next_prime(len(I))
    for attempt in range(config.max_attempts):
        z: List[int] = [1]
        for ell in range(1, d):
            projected = np.unique(K[:, : ell + 1], axis=0)
            partial = lattice_bins(projected[:, :ell], Rank1Lattice(tuple(z), M))
            last = np.mod(projected[:, ell], M)
            chosen = None
            for candidate in range(1, min(M - 1, config.cbc_scan_limit) + 1):
                if _is_injective(np.mod(partial + last * candidate, M)):
                    chosen = candidate
                    break
            if chosen is None:
                break
            z.append(chosen)
        if len(z) == d:
            lat = Rank1Lattice(tuple(z), M)
            logger.debug(f"cbc: found {lat} after {attempt + 1} size step(s)")
            return lat
        M = next_prime(int(math.ceil(M * config.growth_factor)))
    raise SearchExhaustedError("cbc", config.max_attempts, M)


def find_reconstructing_lattice(
    I: FrequencySet,
    strategy: Optional[str] = None,
    seed: int = 0,
    config: Optional[LatticeConfig] = None,
    cache: Optional["LatticeCache"] = None,
) -> Rank1Lattice:
    """Search for a lattice that is reconstructing for `I`.

    grow-M-random-z tries primes M starting at the next prime >= |I|, with
    `draws_per_size` random z (z_1 = 1) per size, growing M geometrically.
    cbc fixes a prime M and picks z_l greedily, coordinate by coordinate;
    in one dimension it returns the minimal M. Both are deterministic (cbc
    ignores the seed).

    Raises:
        SearchExhaustedError: when `max_attempts` size steps fail.
    """
    config = config or LatticeConfig()
    strategy = strategy or config.strategy
    if strategy not in STRATEGIES:
        raise PreconditionError(f"Unknown lattice strategy '{strategy}'. Available: {', '.join(STRATEGIES)}")
    if len(I) < 1:
        raise PreconditionError("Frequency set must not be empty")

    cache_seed = None if strategy == "cbc" else int(seed)
    if cache is not None:
        cached = cache.lookup(I, strategy, cache_seed)
        if cached is not None and is_reconstructing(cached, I):
            logger.debug(f"Lattice cache hit for {I.descriptor}: {cached}")
            return cached

    if len(I) == 1:
        lat = Rank1Lattice((1,) * I.dim, 1)
    elif strategy == "cbc":
        lat = _search_cbc(I, config)
    else:
        lat = _search_random(I, seed, config)

    logger.info(f"Found reconstructing {lat} for |I|={len(I)} ({strategy})")
    if cache is not None:
        cache.store(lat, I, strategy, cache_seed)
    return lat


def exact_quadrature(samples: Sequence[complex]) -> complex:
    """Lattice rule (1/M) sum_j samples_j.

    numpy's pairwise summation keeps the rounding error at O(log M) eps.
    """
    values = np.asarray(samples, dtype=np.complex128)
    if values.size < 1:
        raise PreconditionError("Quadrature needs at least one sample")
    return complex(np.mean(values))


class LatticeCache:
    """JSON-lines store of verified lattices keyed by frequency-set descriptor."""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path else get_cache_path()

    def records(self) -> List[Dict[str, Any]]:
        """All readable records; malformed lines are skipped with a warning."""
        if not self.path.exists():
            return []
        records = []
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    Rank1Lattice.from_dict(record)
                    records.append(record)
                except (ValueError, KeyError, TypeError, PreconditionError) as e:
                    logger.warning(f"Skipping malformed lattice cache line {lineno} in {self.path}: {e}")
        return records

    def lookup(
        self, I: FrequencySet, strategy: str, seed: Optional[int]
    ) -> Optional[Rank1Lattice]:
        descriptor = I.descriptor
        for record in reversed(self.records()):
            if (
                record.get("index_set") == descriptor
                and record.get("strategy") == strategy
                and record.get("seed") == seed
                and record.get("verified", False)
            ):
                return Rank1Lattice.from_dict(record)
        return None

    def store(
        self, lat: Rank1Lattice, I: FrequencySet, strategy: str, seed: Optional[int]
    ) -> None:
        record = {
            **lat.to_dict(),
            "index_set": I.descriptor,
            "strategy": strategy,
            "seed": seed,
            "verified": is_reconstructing(lat, I),
        }
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, sort_keys=True) + "\n")
        except OSError as e:
            logger.warning(f"Failed to write lattice cache {self.path}: {e}")

    def export(self, destination: Union[str, Path]) -> int:
        """Write all records to `destination`; returns the record count."""
        records = self.records()
        with open(destination, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True) + "\n")
        return len(records)

    def import_records(self, source: Union[str, Path]) -> int:
        """Append records from `source` that are not already cached."""
        incoming = LatticeCache(source).records()
        existing = {json.dumps(r, sort_keys=True) for r in self.records()}
        added = 0
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            for record in incoming:
                line = json.dumps(record, sort_keys=True)
                if line not in existing:
                    f.write(line + "\n")
                    existing.add(line)
                    added += 1
        return added

    def clear(self) -> int:
        """Delete the cache file; returns how many records it held."""
        count = len(self.records())
        if self.path.exists():
            self.path.unlink()
        return count
