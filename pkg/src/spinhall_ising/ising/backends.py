"""Flip-probability backends for a spin update.

``curve`` interpolates a calibrated switching curve, ``llg`` runs a
thermalized write event per update, ``majority`` is the deterministic
majority rule used for testing (flip iff strictly more than half the vote
weight prefers the opposite state).
"""

from __future__ import annotations

import numpy as np

from ..device import SwitchCurve, psw_lookup
from ..magnetics.llg import IntegratorConfig, Macrospin, write_trials
from .core import VoteCurrentMap, vote_to_current


class TableBackend:
    """A backend whose flip probability depends only on ``(votes, total)`` and the map."""

    name = "table"

    def probability(self, votes, total, vmap: VoteCurrentMap):
        raise NotImplementedError

    def table(self, totals, vmap: VoteCurrentMap):
        """Flat probability table and per-spin offsets: ``p = table[offset[i] + votes]``."""
        totals = np.asarray(totals, dtype=np.int64)
        distinct = np.unique(totals)
        start = {}
        chunks = []
        pos = 0
        for w in distinct:
            w = int(w)
            start[w] = pos
            chunks.append(np.array([self.probability(v, w, vmap) for v in range(w + 1)], dtype=float))
            pos += w + 1
        offsets = np.array([start[int(w)] for w in totals], dtype=np.int64)
        return np.concatenate(chunks), offsets

    def sample(self, votes, total, vmap, spin, rng: np.random.Generator):
        return bool(rng.random() < self.probability(votes, total, vmap))


class CurveBackend(TableBackend):
    name = "curve"

    def __init__(self, curve: SwitchCurve):
        self.curve = curve

    def flip_probability(self, current):
        return psw_lookup(self.curve, current)

    def probability(self, votes, total, vmap):
        return psw_lookup(self.curve, vote_to_current(votes, total, vmap))

    def describe(self):
        return {"backend": self.name, "curve_points": len(self.curve),
                "curve_range_uA": [float(self.curve.I_uA[0]), float(self.curve.I_uA[-1])]}


class MajorityBackend(TableBackend):
    name = "majority"

    def probability(self, votes, total, vmap):
        return 1.0 if 2 * votes > total else 0.0

    def describe(self):
        return {"backend": self.name}


class LLGBackend:
    """Each update is a fresh thermalized write trial on the macrospin model.

    The cell starts in the well of its current logical state (``+1`` along the
    easy axis), is driven toward the opposite well, and relaxes.
    """

    name = "llg"

    def __init__(self, model: Macrospin, pulse_timing=(3e-9, 6e-9), config: IntegratorConfig | None = None,
                 engine=None):
        self.model = model
        self.pulse_timing = tuple(pulse_timing)
        self.config = config or IntegratorConfig()
        self.engine = engine

    def flip_many(self, current, spin, gens):
        return write_trials(current, gens, self.model, self.pulse_timing, self.config, start_sign=int(spin),
                            engine=self.engine)

    def sample(self, votes, total, vmap, spin, rng: np.random.Generator):
        return bool(self.flip_many(vote_to_current(votes, total, vmap), spin, [rng])[0])

    def describe(self):
        return {"backend": self.name, "torque_scale": self.model.torque_scale, "dt": self.config.dt,
                "t_write": self.pulse_timing[0], "t_relax": self.pulse_timing[1]}
