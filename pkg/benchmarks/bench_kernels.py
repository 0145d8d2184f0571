"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--trials 200] [--sweeps 50] [--oracle-n 18]

Each benchmark runs both engines on identical inputs, checks that they
produce identical results and reports wall time per unit of work.  The
numba timings exclude compilation (one warm-up call first).
"""

import argparse
import time

import numpy as np

from spinhall_ising.device import load_shipped_curve
from spinhall_ising.ising import AnnealSchedule, CouplingGraph, CurveBackend, VoteCurrentMap, run
from spinhall_ising.magnetics import Macrospin, RngStream, write_trials
from spinhall_ising.params import DeviceParams
from spinhall_ising.problems import brute_force, digit_instance, glyph


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def bench_llg(n_trials):
    model = Macrospin.from_params(DeviceParams.calibrated())
    stream = RngStream(1, 99)
    write_trials(90e-6, stream.trial_generators(2), model, engine="numba")
    rows = {}
    for engine in ("numba", "numpy"):
        flips, dt = timed(lambda: write_trials(90e-6, stream.trial_generators(n_trials), model, engine=engine))
        rows[engine] = (flips, dt / n_trials)
    assert np.array_equal(rows["numba"][0], rows["numpy"][0]), "engines disagree on write trials"
    return {k: v[1] for k, v in rows.items()}, "s/trial"


def bench_sweeps(n_sweeps):
    g, _ = digit_instance([glyph(d) for d in range(5)])
    backend = CurveBackend(load_shipped_curve())
    sched = AnnealSchedule.constant(VoteCurrentMap(82e-6, 97e-6))
    run(g, backend, sched, 1, seed=0, engine="numba")
    rows = {}
    for engine in ("numba", "numpy"):
        stats, dt = timed(lambda: run(g, backend, sched, n_sweeps, seed=0, order_policy="random", engine=engine))
        rows[engine] = (stats.energy_trace, dt / n_sweeps)
    assert np.array_equal(rows["numba"][0], rows["numpy"][0]), "engines disagree on sweeps"
    return {k: v[1] for k, v in rows.items()}, f"s/sweep ({g.n} spins)"


def bench_oracle(n):
    rng = np.random.default_rng(n)
    edges = [(i, j, int(rng.choice([-2, -1, 1, 2]))) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
    g = CouplingGraph.from_edges(n, edges)
    brute_force(CouplingGraph.from_edges(3, [(0, 1, 1)]), engine="numba")
    rows = {}
    for engine in ("numba", "numpy"):
        gs, dt = timed(lambda: brute_force(g, engine=engine))
        rows[engine] = (gs.states, dt)
    assert np.array_equal(rows["numba"][0], rows["numpy"][0]), "engines disagree on ground states"
    return {k: v[1] for k, v in rows.items()}, f"s/enumeration (n = {n})"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--sweeps", type=int, default=50)
    ap.add_argument("--oracle-n", type=int, default=18)
    args = ap.parse_args()

    print(f"{'kernel':<14}{'numba':>12}{'numpy':>12}{'speedup':>10}  unit")
    for name, (times, unit) in (
        ("llg trials", bench_llg(args.trials)),
        ("ising sweeps", bench_sweeps(args.sweeps)),
        ("brute force", bench_oracle(args.oracle_n)),
    ):
        nb, npy = times["numba"], times["numpy"]
        print(f"{name:<14}{nb:>12.3e}{npy:>12.3e}{npy / nb:>9.1f}x  {unit}")


if __name__ == "__main__":
    main()
