"""Per-trial random streams.

Trial ``i`` of a run seeded with ``master_seed`` draws from numpy's Philox
4x64 counter-based generator keyed by the 128-bit value
``(master_seed, i)``, starting at counter zero.  Streams therefore depend
only on that pair, never on how trials are split across workers.
"""

from __future__ import annotations

import numpy as np

_U64 = 1 << 64


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    if not 0 <= master_seed < _U64:
        raise ValueError("master seed must fit in 64 unsigned bits")
    if not 0 <= trial_index < _U64:
        raise ValueError("trial index must fit in 64 unsigned bits")
    key = np.array([master_seed, trial_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
