"""Exhaustive ground-state enumeration.

State code ``k`` maps bit ``b`` to spin ``b``: set bit is ``+1``, clear bit
is ``-1``.  The numba engine walks a Gray code, updating local fields per
single flip; the numpy engine evaluates chunks of codes densely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._accel import njit, resolve_engine
from ..ising.core import hamiltonian
from ..ising.graph import CouplingGraph

DEFAULT_LIMIT = 24
_CHUNK_BITS = 14


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class GroundStates:
    energy: int
    states: np.ndarray  # (count, n) of +-1, ordered by state code
    n_states_checked: int


def codes_to_spins(codes, n):
    codes = np.asarray(codes, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int64)


@njit(cache=True)
def _gray_scan(n, indptr, indices, data, h):
    s = -np.ones(n, dtype=np.int64)
    field = h.copy()
    for i in range(n):
        for jj in range(indptr[i], indptr[i + 1]):
            field[i] += data[jj] * s[indices[jj]]
    # H = -1/2 sum_i s_i (field_i + h_i)
    e2 = 0
    for i in range(n):
        e2 -= s[i] * (field[i] + h[i])
    energy = e2 // 2
    best = energy
    buf = np.empty(64, dtype=np.int64)
    count = 1
    buf[0] = 0
    code = 0
    total = np.int64(1) << n
    for k in range(1, total):
        i = 0
        while (k >> i) & 1 == 0:
            i += 1
        energy += 2 * s[i] * field[i]
        s[i] = -s[i]
        code ^= np.int64(1) << i
        for jj in range(indptr[i], indptr[i + 1]):
            field[indices[jj]] += 2 * data[jj] * s[i]
        if energy < best:
            best = energy
            count = 0
        if energy == best:
            if count == buf.shape[0]:
                grown = np.empty(2 * count, dtype=np.int64)
                grown[:count] = buf
                buf = grown
            buf[count] = code
            count += 1
    return best, buf[:count].copy()


def _chunk_scan(g: CouplingGraph):
    n = g.n
    J = g.J.toarray()
    h = np.asarray(g.h, dtype=np.int64)
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)
    best = None
    found = []
    for lo in range(0, total, step):
        codes = np.arange(lo, min(lo + step, total), dtype=np.int64)
        S = codes_to_spins(codes, n)
        e = -(np.einsum("ki,ki->k", S @ J, S) // 2) - S @ h
        m = int(e.min())
        if best is None or m < best:
            best = m
            found = []
        if m == best:
            found.append(codes[e == m])
    return best, np.concatenate(found)


def brute_force(g: CouplingGraph, limit=DEFAULT_LIMIT, engine=None):
    """Exact minimum of ``H`` over all ``2**n`` states and every state attaining it."""
    if g.n > limit:
        raise OracleSizeError(f"{g.n} spins exceeds the exhaustive-search limit of {limit}")
    if g.n > 62:
        raise OracleSizeError("state codes are 64-bit")
    engine = resolve_engine(engine)
    if engine == "numba":
        best, codes = _gray_scan(g.n, g.indptr, g.indices, g.data.astype(np.int64), np.asarray(g.h, np.int64))
    else:
        best, codes = _chunk_scan(g)
    codes = np.sort(codes)
    states = codes_to_spins(codes, g.n)
    if hamiltonian(states[0], g) != best:
        raise RuntimeError("enumeration kernel reported an unattained minimum")
    return GroundStates(int(best), states, 1 << g.n)
