"""Deterministic, collision-free random streams for all seeded operations.

Every consumer derives its generator from (seed, purpose, index) via a
counter-based Philox generator: the key comes from the seed alone, and each
(purpose, index) pair claims a disjoint 2**128-draw block of the counter
space.  Streams are therefore independent of execution order and thread
count, which is what makes the bootstrap reproducible under --threads.
"""

from __future__ import annotations

import numpy as np

# Purpose tags partition the counter space; never renumber, results depend
# on them.
PURPOSE_PIVOT = 0        # outer bootstrap iterations, index = iteration
PURPOSE_BAND_SIGMA = 1   # band sigma resampling of the original groups
PURPOSE_SYNTH = 2        # synthetic group noise
PURPOSE_PRTS = 3         # ternary-register initial state
PURPOSE_CALIBRATE = 4    # per-replicate seeds in calibration runs


def philox_stream(seed, purpose, index=0) -> np.random.Generator:
    """Generator for the (purpose, index) block of the seed's stream space."""
    key = np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)
    counter = ((int(purpose) << 64) + int(index)) << 128
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
