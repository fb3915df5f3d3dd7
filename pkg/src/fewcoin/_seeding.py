"""Deterministic RNG stream derivation.

Every randomized component takes streams derived from (master_seed, labels)
through numpy's SeedSequence hash, so results never depend on scheduling or
worker count.
"""

from __future__ import annotations

import numpy as np


def stream(master_seed: int, *labels: int) -> np.random.Generator:
    """Independent generator for (master_seed, labels)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(x) for x in labels))
    return np.random.Generator(np.random.PCG64(ss))
