"""Hamiltonian, majority votes and the vote-to-current map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CouplingGraph

UA = 1e-6


def as_spins(s, n=None):
    """Validate a spin vector: integer entries, each exactly +1 or -1."""
    a = np.asarray(s)
    if a.ndim != 1:
        raise ValueError("spin array must be one-dimensional")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"spin array has length {a.shape[0]}, expected {n}")
    if not np.all((a == 1) | (a == -1)):
        raise ValueError("spins must be +1 or -1")
    return a.astype(np.int64)


def hamiltonian(s, g: CouplingGraph):
    """``H = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i`` as an exact integer."""
    s = as_spins(s, g.n)
    pair = int(s @ (g.J @ s))  # counts every pair twice
    return -(pair // 2) - int(g.h @ s)


def count_votes(i, s, g: CouplingGraph):
    """``(votes_to_flip, total_weight)`` for spin ``i``.

    Neighbour ``j`` casts ``|J_ij|`` votes for ``sign(J_ij s_j)``; the field
    casts ``|h_i|`` votes for ``sign(h_i)``.  Votes to flip are those
    preferring ``-s_i``.
    """
    if not 0 <= i < g.n:
        raise IndexError(f"spin index {i} out of range")
    s_i = s[i]
    nbr, w = g.neighbors(i)
    prod = w * s[nbr] * s_i
    votes = int(-prod[prod < 0].sum())
    total = int(np.abs(w).sum())
    hs = int(g.h[i]) * s_i
    if hs < 0:
        votes += -hs
    total += abs(int(g.h[i]))
    return votes, total


@dataclass(frozen=True)
class VoteCurrentMap:
    """Affine map from vote fraction to write current (amperes)."""

    I_min: float
    I_max: float

    def __post_init__(self):
        if not 0 < self.I_min < self.I_max:
            raise ValueError("require 0 < I_min < I_max")

    def increment(self, total_weight):
        return (self.I_max - self.I_min) / total_weight

    @classmethod
    def from_curve(cls, curve, p_low, p_high):
        """Endpoints where the device curve reaches ``p_low`` and ``p_high``, rounded to 1 nA."""
        from ..device import crossing_current

        lo = round(crossing_current(curve, p_low) * 1e9) * 1e-9
        hi = round(crossing_current(curve, p_high) * 1e9) * 1e-9
        return cls(lo, hi)

    def to_dict(self):
        return {"I_min_uA": self.I_min / UA, "I_max_uA": self.I_max / UA}


def vote_to_current(votes_to_flip, total_weight, vmap: VoteCurrentMap):
    """``I_min + votes * (I_max - I_min) / total``; an isolated spin gets ``I_min``."""
    if total_weight == 0:
        return vmap.I_min
    if not 0 <= votes_to_flip <= total_weight:
        raise ValueError(f"votes {votes_to_flip} outside [0, {total_weight}]")
    return vmap.I_min + votes_to_flip * (vmap.I_max - vmap.I_min) / total_weight


@dataclass(frozen=True)
class AnnealSchedule:
    """Piecewise-constant vote-current maps: ``phases[k] = (start_sweep, map)``."""

    phases: tuple

    def __post_init__(self):
        phases = tuple((int(start), m if isinstance(m, VoteCurrentMap) else VoteCurrentMap(*m))
                       for start, m in self.phases)
        if not phases:
            raise ValueError("schedule needs at least one phase")
        starts = [p[0] for p in phases]
        if starts[0] != 0:
            raise ValueError("first phase must start at sweep 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("phase starts must be strictly increasing")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def constant(cls, vmap: VoteCurrentMap):
        return cls(((0, vmap),))

    @classmethod
    def from_uA(cls, spec):
        """``[(start, I_min_uA, I_max_uA), ...]``."""
        return cls(tuple((start, VoteCurrentMap(lo * UA, hi * UA)) for start, lo, hi in spec))

    @classmethod
    def parse(cls, text):
        """``"0:84.2-96.8,400:60-120"`` (currents in uA)."""
        spec = []
        for part in text.split(","):
            try:
                start, rng = part.split(":")
                lo, hi = rng.split("-")
                spec.append((int(start), float(lo), float(hi)))
            except ValueError:
                raise ValueError(f"bad schedule phase {part!r}; expected start:I_min-I_max") from None
        return cls.from_uA(spec)

    def map_at(self, sweep):
        current = self.phases[0][1]
        for start, vmap in self.phases:
            if start > sweep:
                break
            current = vmap
        return current

    @property
    def boundaries(self):
        return tuple(p[0] for p in self.phases[1:])

    def to_text(self):
        return ",".join(f"{s}:{m.I_min / UA:.6g}-{m.I_max / UA:.6g}" for s, m in self.phases)

    def to_list(self):
        return [{"start_sweep": s, **m.to_dict()} for s, m in self.phases]
