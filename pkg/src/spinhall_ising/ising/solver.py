"""Asynchronous stochastic sweeps and annealed runs.

One update reads the spin, tallies neighbour votes, drives a write current
toward the opposite state and flips with the backend's probability.  Every
update is charged one read and one write in the energy ledger.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._accel import resolve_engine
from ..device import EnergyLedger, params_energy
from ..params import DeviceParams
from ..rng import named_generator
from .backends import LLGBackend, TableBackend
from .core import AnnealSchedule, VoteCurrentMap, as_spins, count_votes, hamiltonian, vote_to_current
from .graph import CouplingGraph
from .kernels import SWEEP_KERNELS, vote_currents

ORDER_POLICIES = ("sequential", "random")
DEFAULT_DEVICE = DeviceParams.calibrated()


def update_spin(i, s, g: CouplingGraph, backend, vmap: VoteCurrentMap, rng: np.random.Generator,
                device: DeviceParams = DEFAULT_DEVICE):
    """Update spin ``i`` of ``s`` in place.  Returns ``(new_s_i, flipped, ledger)``."""
    votes, total = count_votes(i, s, g)
    current = vote_to_current(votes, total, vmap)
    try:
        flipped = backend.sample(votes, total, vmap, int(s[i]), rng)
    except Exception as exc:
        raise type(exc)(f"update of spin {i} failed: {exc}") from exc
    if flipped:
        s[i] = -s[i]
    return int(s[i]), flipped, params_energy(device, current)


@dataclass
class SweepStats:
    flips: int
    votes: np.ndarray
    order: np.ndarray
    energy: int
    ledger: EnergyLedger


def _order(n, policy, rng):
    if policy == "sequential":
        return np.arange(n, dtype=np.int64)
    if policy == "random":
        return rng.permutation(n).astype(np.int64)
    raise ValueError(f"order policy must be one of {ORDER_POLICIES}")


def _sweep_ledger(currents, n, device: DeviceParams):
    write = device.V_DD * currents * device.t_PW
    one = params_energy(device, 0.0)
    return EnergyLedger(
        write_J=float(np.sum(write)),
        read_J=one.read_J * n,
        relax_J=one.relax_J * n,
        overhead_J=one.overhead_J * n,
        updates=n,
    )


class _Prepared:
    """Graph arrays and per-map probability tables, cached across sweeps."""

    def __init__(self, g: CouplingGraph, backend):
        self.g = g
        self.backend = backend
        self.indptr = g.indptr
        self.indices = g.indices
        self.data = g.data.astype(np.int64)
        self.h = np.asarray(g.h, dtype=np.int64)
        self.totals = g.total_weight()
        self._tables = {}

    def table(self, vmap):
        if vmap not in self._tables:
            self._tables[vmap] = self.backend.table(self.totals, vmap)
        return self._tables[vmap]


def _sweep(prep: _Prepared, s, vmap, order_policy, rng, order_rng, engine, device, llg_gens=None):
    g = prep.g
    order = _order(g.n, order_policy, order_rng)
    backend = prep.backend
    if isinstance(backend, TableBackend):
        u = rng.random(g.n)
        table, offsets = prep.table(vmap)
        votes = np.zeros(g.n, dtype=np.int64)
        flips = SWEEP_KERNELS[engine](s, order, u, prep.indptr, prep.indices, prep.data, prep.h, offsets,
                                      table, votes)
    else:
        gens = llg_gens if llg_gens is not None else rng.spawn(g.n)
        votes = np.zeros(g.n, dtype=np.int64)
        flips = 0
        for k, i in enumerate(order):
            votes[k], total = count_votes(int(i), s, g)
            if backend.sample(int(votes[k]), total, vmap, int(s[i]), gens[k]):
                s[i] = -s[i]
                flips += 1
    currents = vote_currents(votes, prep.totals[order], vmap.I_min, vmap.I_max)
    ledger = _sweep_ledger(currents, g.n, device)
    return SweepStats(int(flips), votes, order, hamiltonian(s, g), ledger)


def sweep(s, g: CouplingGraph, backend, vmap: VoteCurrentMap, order_policy="sequential", rng=None,
          order_rng=None, engine=None, device: DeviceParams = DEFAULT_DEVICE):
    """Update every spin once, in place, then recompute the Hamiltonian."""
    if not isinstance(s, np.ndarray) or s.dtype != np.int64:
        raise TypeError("s must be an int64 numpy array (use as_spins)")
    as_spins(s, g.n)
    rng = rng if rng is not None else np.random.default_rng()
    order_rng = order_rng if order_rng is not None else rng
    return _sweep(_Prepared(g, backend), s, vmap, order_policy, rng, order_rng, resolve_engine(engine), device)


@dataclass
class RunStats:
    energy_trace: np.ndarray  # H before the first sweep and after each sweep
    flips: np.ndarray  # flips per sweep
    ledger: EnergyLedger
    sweeps: int
    updates: int
    final_state: np.ndarray
    best_energy: int
    best_state: np.ndarray
    best_sweep: int
    converged_sweep: int | None = None  # first sweep whose energy reached the target
    snapshots: dict = field(default_factory=dict)
    seed: int | None = None
    schedule: AnnealSchedule | None = None

    @property
    def final_energy(self):
        return int(self.energy_trace[-1])

    def mean_flips(self, start=0, stop=None):
        seg = self.flips[start:stop]
        return float(seg.mean()) if seg.size else float("nan")

    def summary(self):
        return {
            "sweeps": self.sweeps,
            "updates": self.updates,
            "final_energy": self.final_energy,
            "best_energy": self.best_energy,
            "best_sweep": self.best_sweep,
            "converged_sweep": self.converged_sweep,
            "total_flips": int(self.flips.sum()),
            "energy": self.ledger.to_dict(),
        }


def random_state(n, seed):
    gen = named_generator(seed, "initial")
    return (2 * gen.integers(0, 2, size=n) - 1).astype(np.int64)


def run(g: CouplingGraph, backend, schedule: AnnealSchedule, max_sweeps, seed, initial=None,
        target_energy=None, order_policy="sequential", engine=None, device: DeviceParams = DEFAULT_DEVICE,
        snapshot_sweeps=()):
    """Anneal ``g`` for up to ``max_sweeps`` sweeps.

    Randomness: initial state, sweep order and update draws come from the
    ``initial``, ``order`` and ``updates`` sub-streams of ``seed``; the
    ``llg`` backend draws one write-trial generator per update from
    ``llg_updates``.  Stops early once the energy is at or below
    ``target_energy``.  ``snapshot_sweeps`` lists sweep counts whose states
    are kept (0 is the initial state).
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    engine = resolve_engine(engine)
    s = random_state(g.n, seed) if initial is None else as_spins(initial, g.n).copy()
    order_rng = named_generator(seed, "order")
    update_rng = named_generator(seed, "updates")
    prep = _Prepared(g, backend)
    snap_at = set(int(k) for k in snapshot_sweeps)
    snapshots = {0: s.copy()} if 0 in snap_at else {}
    energy = hamiltonian(s, g)
    trace = [energy]
    flips = []
    ledger = EnergyLedger()
    best_energy, best_state, best_sweep = energy, s.copy(), 0
    converged = 0 if target_energy is not None and energy <= target_energy else None
    done = 0
    while done < max_sweeps and converged is None:
        vmap = schedule.map_at(done)
        llg_gens = None
        if isinstance(backend, LLGBackend):
            llg_gens = named_generator(seed, "llg_updates", done).spawn(g.n)
        st = _sweep(prep, s, vmap, order_policy, update_rng, order_rng, engine, device, llg_gens)
        done += 1
        trace.append(st.energy)
        flips.append(st.flips)
        ledger.add(st.ledger)
        if st.energy < best_energy:
            best_energy, best_state, best_sweep = st.energy, s.copy(), done
        if done in snap_at:
            snapshots[done] = s.copy()
        if target_energy is not None and st.energy <= target_energy:
            converged = done
    return RunStats(
        energy_trace=np.asarray(trace, dtype=np.int64),
        flips=np.asarray(flips, dtype=np.int64),
        ledger=ledger,
        sweeps=done,
        updates=done * g.n,
        final_state=s,
        best_energy=int(best_energy),
        best_state=best_state,
        best_sweep=best_sweep,
        converged_sweep=converged,
        snapshots=snapshots,
        seed=seed,
        schedule=schedule,
    )
