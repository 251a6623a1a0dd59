"""Pure-Python fallback for the trajectory walker.

Vectorized across chains, looping over time steps; produces bit-identical
trajectories to the compiled kernel because both consume the same uniforms
with the same tie rule (count of cumulative entries <= u, clamped to the
last state).
"""

import numpy as np


def walk(cum: np.ndarray, starts: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Walk ``R`` chains for ``T`` transitions; see revmc._walk.walk."""
    R = starts.shape[0]
    T = uniforms.shape[1]
    n = cum.shape[0]
    out = np.empty((R, T + 1), dtype=np.int64)
    state = starts.astype(np.int64, copy=True)
    out[:, 0] = state
    last = n - 1
    for t in range(T):
        rows = cum[state]
        nxt = (rows <= uniforms[:, t, None]).sum(axis=1)
        np.minimum(nxt, last, out=nxt)
        state = nxt
        out[:, t + 1] = state
    return out
