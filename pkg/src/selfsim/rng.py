"""Seeded random streams.

Every random choice in the package draws from ``stream(seed, *key)``: a
numpy ``PCG64`` generator seeded by ``SeedSequence(seed, spawn_key=key)``.
Distinct keys give statistically independent streams and the mapping is
fixed by numpy's SeedSequence contract, so results are reproducible from
``(seed, key)`` alone.  Keys used in the package:

* ``()``            -- graph generation (``gen``)
* ``(0,)``          -- the four-way vertex partition in ``key_similarity``
* ``(1 + r,)``      -- restart ``r`` of a B-side bijection draw
"""
import numpy as np

PRNG_ID = "numpy-PCG64-SeedSequence-v1"


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
