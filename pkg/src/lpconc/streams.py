"""Deterministic random streams keyed by ``(seed, chunk)``.

Every Monte Carlo quantity in the package is computed by splitting the trials
into a fixed number of chunks. Chunk ``k`` of a run seeded with ``seed`` draws
from a Philox counter-based generator whose key is derived from
``SeedSequence(seed, spawn_key=(family, k))``. ``family`` separates unrelated
populations that share a seed (sphere draws use 0, ball draws use 1). A
chunk's stream depends on nothing else, so serial and parallel runs produce the
same numbers.
"""

from __future__ import annotations

import numpy as np

# Upper bound on the number of float64 entries materialised per batch.
BATCH_ELEMENTS = 1 << 20


def make_stream(seed: int, chunk: int = 0, family: int = 0) -> np.random.Generator:
    if seed < 0 or chunk < 0 or family < 0:
        raise ValueError("seed, chunk and family must be non-negative integers")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(family), int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(trials: int, chunks: int) -> list[int]:
    """Split ``trials`` into ``chunks`` near-equal parts (earlier chunks get the remainder)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if chunks < 1:
        raise ValueError("chunks must be >= 1")
    base, extra = divmod(trials, chunks)
    return [base + (1 if k < extra else 0) for k in range(chunks)]


def batch_rows(n: int) -> int:
    """Rows per in-chunk batch for vectors of dimension ``n``."""
    return max(1, BATCH_ELEMENTS // max(1, n))
