"""Random streams.

Every random object is drawn from a numpy ``Generator`` backed by the
counter-based Philox bit generator.  Replica ``i`` of a run with master
seed ``s`` uses the key derived by ``SeedSequence([s, i])``, so results
do not depend on which worker handles which replica.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), int(index)])
    return np.random.Generator(np.random.Philox(ss))


def randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) for arbitrarily large n."""
    if n <= 0:
        raise ValueError("empty range")
    if n <= 2**62:
        return int(rng.integers(n))
    bits = n.bit_length()
    nwords = (bits + 31) // 32
    while True:
        x = 0
        for w in rng.integers(0, 2**32, size=nwords, dtype=np.uint64).tolist():
            x = (x << 32) | int(w)
        x >>= nwords * 32 - bits
        if x < n:
            return x


def choose_weighted(rng: np.random.Generator, weights: list[int]) -> int:
    """Index drawn with probability proportional to exact integer weights."""
    x = randbelow(rng, sum(weights))
    for i, w in enumerate(weights):
        if x < w:
            return i
        x -= w
    raise AssertionError("unreachable")
