"""Counter-based random streams.

Every random draw in the package comes from a Philox-4x64 generator whose
128-bit key is ``(seed << 64) | index`` and whose counter starts at
``[0, 0, 0, stream]``. A given ``(seed, stream, index)`` therefore always
produces the same numbers, independent of batching, thread scheduling or the
order in which substreams are requested.
"""

import numpy as np

# stream identifiers, kept distinct so different consumers never overlap
DIRECTIONS = 1
DATA_X = 2
DATA_Y = 3
DATA_W = 4
SPECTRAL = 5
PHASES = 6

_MASK64 = (1 << 64) - 1


def substream(seed, stream, index=0):
    """Return a generator for the substream ``(seed, stream, index)``."""
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    key = (seed << 64) | (int(index) & _MASK64)
    bitgen = np.random.Philox(key=key, counter=[0, 0, 0, int(stream)])
    return np.random.Generator(bitgen)


def derive_seed(seed, rep):
    """Seed used for repetition ``rep`` of an experiment with base ``seed``."""
    return (int(seed) * 1_000_003 + int(rep)) & _MASK64
