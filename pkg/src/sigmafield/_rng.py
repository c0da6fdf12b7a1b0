"""Counter-based random streams.

Every variate is a pure function of ``(seed, stream, column, path)``: each
column owns a Philox key and the path index is the counter position.  Adding
paths or columns never changes previously drawn values, and any block of
paths can be regenerated independently of the others.
"""

import numpy as np
from scipy.special import ndtri

# stream ids, one per consumer so unrelated draws never share keys
FIELD = 0
KL = 1
FBM_GRID = 2
TIMECHANGE = 3
CHAIN = 4
COUPLED = 5
FBM_CHOL = 6

_MAX_SEED = 2**64


def _bitgen(seed, stream, column):
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Philox(key=seed + ((((int(stream) & 0xFFFFFFFF) << 32) | int(column)) << 64))


def raw_block(seed, stream, column, n, offset=0):
    """``n`` raw 64-bit words for one column, starting at path ``offset``."""
    bg = _bitgen(seed, stream, column)
    skip, lane = divmod(int(offset), 4)
    if skip:
        bg.advance(skip)
    words = bg.random_raw(lane + n)
    return words[lane:]


def uniform(seed, stream, columns, n_paths, offset=0):
    """Uniforms on the open interval (0, 1), shape ``(n_paths, len(columns))``."""
    columns = list(columns)
    out = np.empty((n_paths, len(columns)))
    for j, c in enumerate(columns):
        w = raw_block(seed, stream, c, n_paths, offset)
        out[:, j] = ((w >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return out


def standard_normal(seed, stream, columns, n_paths, offset=0):
    """Standard normals by inverse CDF, shape ``(n_paths, len(columns))``."""
    return ndtri(uniform(seed, stream, columns, n_paths, offset))
