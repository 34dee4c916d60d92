"""Named, seeded random streams.

Every consumer of randomness asks for a stream by name ("points",
"lattice", ...) so adding a consumer never shifts another one's sequence.
"""

import hashlib

import numpy as np


def stream_key(name: str) -> int:
    """Stable 64-bit integer derived from a stream name."""
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def named_generator(seed: int, name: str) -> np.random.Generator:
    """PCG64 generator for the sub-stream `name` of run seed `seed`."""
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, stream_key(name)])
    return np.random.Generator(np.random.PCG64(sequence))
