"""Sweep kernels for table-driven backends.

Both engines visit spins in the given order, see the newest neighbour
states, and flip spin ``order[k]`` iff ``u[k] < table[offset[i] + votes]``.
They consume the same uniforms, so results are identical.
"""

import numpy as np

from .._accel import njit


@njit(cache=True)
def sweep_numba(s, order, u, indptr, indices, data, h, offset, table, votes):
    flips = 0
    for k in range(order.shape[0]):
        i = order[k]
        si = s[i]
        v = 0
        for jj in range(indptr[i], indptr[i + 1]):
            x = data[jj] * s[indices[jj]] * si
            if x < 0:
                v -= x
        x = h[i] * si
        if x < 0:
            v -= x
        votes[k] = v
        if u[k] < table[offset[i] + v]:
            s[i] = -si
            flips += 1
    return flips


def sweep_numpy(s, order, u, indptr, indices, data, h, offset, table, votes):
    flips = 0
    for k, i in enumerate(order):
        si = s[i]
        lo, hi = indptr[i], indptr[i + 1]
        x = data[lo:hi] * s[indices[lo:hi]] * si
        v = -int(x[x < 0].sum())
        hs = h[i] * si
        if hs < 0:
            v -= hs
        votes[k] = v
        if u[k] < table[offset[i] + v]:
            s[i] = -si
            flips += 1
    return flips


SWEEP_KERNELS = {"numba": sweep_numba, "numpy": sweep_numpy}


def vote_currents(votes, totals, I_min, I_max):
    """Vectorized vote-to-current map; zero total weight gives ``I_min``."""
    votes = np.asarray(votes, dtype=float)
    totals = np.asarray(totals, dtype=float)
    safe = np.where(totals > 0, totals, 1.0)
    return np.where(totals > 0, I_min + votes * (I_max - I_min) / safe, I_min)
