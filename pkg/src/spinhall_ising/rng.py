"""Seeded random streams.

Every random draw descends from one user seed through a ``SeedSequence``
spawn key, so each stage (device trials, sweep order, spin updates, ...) can
be reproduced on its own without replaying the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# spawn-key prefixes of the named sub-streams; never renumber
STREAM_IDS = {
    "device": 1,
    "calibration": 2,
    "order": 3,
    "updates": 4,
    "initial": 5,
    "llg_updates": 6,
    "events": 7,
}


@dataclass(frozen=True)
class RngStream:
    """Seed plus sub-stream key; each trial gets its own spawned generator.

    ``stream_id`` is an int or a tuple of ints.
    """

    seed: int
    stream_id: int | tuple = 0

    @property
    def key(self):
        return tuple(self.stream_id) if isinstance(self.stream_id, tuple) else (self.stream_id,)

    def seed_sequence(self):
        return np.random.SeedSequence(self.seed, spawn_key=self.key)

    def generator(self):
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def child(self, *key):
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def trial_generators(self, n, start=0):
        """Generators for trials ``start .. start+n-1`` (independent of batching)."""
        return [
            np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key + (i,))))
            for i in range(start, start + n)
        ]


def named_stream(seed, name, *key) -> RngStream:
    if name not in STREAM_IDS:
        raise KeyError(f"unknown stream {name!r}")
    return RngStream(int(seed), (STREAM_IDS[name],) + tuple(int(k) for k in key))


def named_generator(seed, name, *key) -> np.random.Generator:
    return named_stream(seed, name, *key).generator()


def fresh_seed() -> int:
    """A random 63-bit seed for runs started without one."""
    return int(np.random.SeedSequence().generate_state(2, np.uint64)[0] >> np.uint64(1))
