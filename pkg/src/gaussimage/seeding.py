"""One root seed, split into named independent streams.

Each consumer asks for ``stream(seed, name, *extra)``; the stream index and
any extra integers become the ``spawn_key`` of a ``numpy`` SeedSequence, so
streams never overlap and adding a consumer does not shift the others.
"""
from __future__ import annotations

import numpy as np

STREAMS = {
    "partition": 0,
    "sampling": 1,
    "instances": 2,
    "monte-carlo": 3,
}


def stream(seed: int, name: str, *extra: int) -> np.random.Generator:
    key = (STREAMS[name],) + tuple(int(e) for e in extra)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))
