"""Command-line entry point: ``spinhall-ising``.

Outputs never contain timestamps or timings, so a fixed seed with
``--threads 1`` reproduces every file byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .device import (
    DEFAULT_SWEEP_uA,
    SwitchCurve,
    calibrate_switch_curve,
    calibrate_torque_scale,
    crossing_current,
    load_shipped_curve,
    sweep_currents_uA,
)
from .ising import (
    ORDER_POLICIES,
    AnnealSchedule,
    CouplingGraph,
    CurveBackend,
    LLGBackend,
    MajorityBackend,
    default_schedule,
    hamiltonian,
    run,
)
from .ising.graph import GraphFileError
from .magnetics.llg import IntegratorConfig, Macrospin, NonFiniteStateError
from .params import DeviceParams, ParamFileError, load_params, save_params
from .problems import (
    DEMO_SPECS,
    Bitmap,
    ColoringSpec,
    OracleSizeError,
    WeightedGraph,
    brute_force,
    coloring_decode,
    coloring_encode,
    cut_value,
    glyph,
    grid_instance,
    maxcut_encode,
    penalty_from_energy,
    pixel_agreement,
    tile,
)
from .rng import fresh_seed

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3

KINDS = ("maxcut", "coloring", "digits")


class CliError(Exception):
    pass


# ----------------------------------------------------------------------------
# helpers


def _write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _device_params(args) -> DeviceParams:
    if getattr(args, "params", None):
        return load_params(args.params)
    return DeviceParams.calibrated()


def _seed(args):
    return int(args.seed) if args.seed is not None else fresh_seed()


def _parse_sweep(text):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise CliError(f"--sweep expects I_min:I_max:step in uA, got {text!r}") from None
    return lo, hi, step


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _apply_config(args, parser):
    """Fill options left at their defaults from a JSON ``--config`` file."""
    if not getattr(args, "config", None):
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}") from None
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, attr) == parser.get_default(attr):
            setattr(args, attr, value)


# ----------------------------------------------------------------------------
# problems


class Problem:
    """A loaded instance: its coupling graph plus kind-specific scoring."""

    def __init__(self, kind, source, graph, data, offset=0, shape=None):
        self.kind = kind
        self.source = source
        self.graph = graph
        self.data = data
        self.offset = offset
        self.shape = shape

    def score(self, s):
        H = hamiltonian(s, self.graph)
        out = {"energy": int(H)}
        if self.kind == "maxcut":
            out["cut_value"] = int(cut_value(s, self.data))
        elif self.kind == "coloring":
            res = coloring_decode(s, self.data)
            out["penalty"] = int(penalty_from_energy(H, self.offset))
            out["coloring"] = res.to_dict()
        else:
            out["pixel_agreement"] = pixel_agreement(s, self.data)
        return out

    def solved(self, s):
        if self.kind == "coloring":
            return coloring_decode(s, self.data).proper
        if self.kind == "digits":
            return pixel_agreement(s, self.data) == 1.0
        return None


def load_problem(kind, source) -> Problem:
    if kind == "maxcut":
        wg = WeightedGraph.load(source)
        return Problem(kind, source, maxcut_encode(wg), wg)
    if kind == "coloring":
        if source.startswith("demo:"):
            name = source[5:]
            if name not in DEMO_SPECS:
                raise CliError(f"unknown demo {name!r}; available: {', '.join(DEMO_SPECS)}")
            spec = DEMO_SPECS[name]
        else:
            spec = ColoringSpec.load(source)
        g, offset = coloring_encode(spec)
        return Problem(kind, source, g, spec, offset)
    if kind == "digits":
        if source.startswith("glyphs:"):
            try:
                digits = [int(d) for d in source[7:].split(",") if d]
                target = tile([glyph(d) for d in digits])
            except (KeyError, ValueError) as exc:
                raise CliError(f"bad glyph list {source!r}: {exc}") from None
        else:
            target = Bitmap.load_pgm(source)
        g, t = grid_instance(target)
        return Problem(kind, source, g, t, shape=target.pixels.shape)
    raise CliError(f"unknown problem kind {kind!r}")


def _write_snapshot(problem: Problem, s, path_stem):
    if problem.kind == "digits":
        h, w = problem.shape
        path = Path(f"{path_stem}.pgm")
        Bitmap.from_spins(s, h, w).save_pgm(path)
    else:
        path = Path(f"{path_stem}.json")
        _write_json(path, {"spins": [int(v) for v in s], **problem.score(s)})
    return path.name


# ----------------------------------------------------------------------------
# commands


def cmd_device_sweep(args):
    params = _device_params(args)
    seed = _seed(args)
    lo, hi, step = _parse_sweep(args.sweep)
    currents = sweep_currents_uA(lo, hi, step)
    model = Macrospin.from_params(params)
    config = IntegratorConfig(dt=args.dt)

    def progress(est):
        if not args.quiet:
            print(f"  I = {est.I_q * 1e6:7.2f} uA  p = {est.p_hat:.4f}", file=sys.stderr)

    curve = calibrate_switch_curve(currents, args.trials, model, seed, (params.t_PW, params.t_relax), config,
                                   threads=args.threads, progress=progress)
    meta = dict(curve.metadata)
    meta.update({"params_digest": params.digest(), "params": params.to_dict(), "sweep_uA": [lo, hi, step],
                 "version": __version__})
    curve = SwitchCurve(curve.I_uA, curve.p, curve.ci_lo, curve.ci_hi, metadata=meta)
    out = _out_dir(args)
    path = curve.save(out / "switch_curve.csv")
    try:
        cross = f"{crossing_current(curve, 0.5) * 1e6:.2f} uA"
    except ValueError:
        cross = "not reached in sweep"
    print(f"seed {seed}; wrote {path}; 50% crossing at {cross}")
    return EXIT_OK


def cmd_device_calibrate(args):
    params = _device_params(args)
    seed = _seed(args)
    model = Macrospin.from_params(params)
    cal = calibrate_torque_scale(model, seed, I_target=args.target_current * 1e-6, p_target=args.target_p,
                                 n_trials=args.trials, bracket=(args.scale_min, args.scale_max),
                                 pulse_timing=(params.t_PW, params.t_relax), config=IntegratorConfig(dt=args.dt),
                                 threads=args.threads)
    tuned = params.replace(torque_scale=cal.scale)
    out = _out_dir(args)
    save_params(tuned, out / "params.txt")
    _write_json(out / "calibration.json", {
        "seed": seed,
        "params_digest": tuned.digest(),
        "torque_scale": cal.scale,
        "target_current_uA": args.target_current,
        "target_p": args.target_p,
        "n_trials": cal.n_trials,
        "history": [[s, f] for s, f in cal.history],
        "version": __version__,
    })
    print(f"seed {seed}; torque_scale = {cal.scale:.6g}; wrote {out / 'params.txt'}")
    return EXIT_OK


def _backend(args, params):
    if args.backend == "curve":
        curve = SwitchCurve.load(args.curve) if args.curve else load_shipped_curve()
        return CurveBackend(curve), curve
    if args.backend == "llg":
        return LLGBackend(Macrospin.from_params(params), (params.t_PW, params.t_relax)), None
    if args.backend == "majority":
        return MajorityBackend(), None
    raise CliError(f"unknown backend {args.backend!r}")


def cmd_solve(args):
    params = _device_params(args)
    seed = _seed(args)
    problem = load_problem(args.kind, args.problem)
    backend, curve = _backend(args, params)
    if args.schedule:
        schedule = AnnealSchedule.parse(args.schedule)
    else:
        schedule = default_schedule(curve if curve is not None else load_shipped_curve())
    target = args.target_energy
    oracle = None
    if args.oracle:
        try:
            oracle = brute_force(problem.graph)
        except OracleSizeError as exc:
            raise CliError(f"--oracle refused: {exc}") from None
        if target is None:
            target = oracle.energy
    snaps = {0, args.sweeps}
    snaps.update(b for b in schedule.boundaries if b < args.sweeps)
    stats = run(problem.graph, backend, schedule, args.sweeps, seed, target_energy=target,
                order_policy=args.order, device=params, snapshot_sweeps=snaps)
    if stats.sweeps not in stats.snapshots:
        stats.snapshots[stats.sweeps] = stats.final_state.copy()

    out = _out_dir(args)
    with (out / "trace.csv").open("w") as fh:
        fh.write("sweep,energy,flips\n")
        fh.write(f"0,{stats.energy_trace[0]},0\n")
        for k in range(stats.sweeps):
            fh.write(f"{k + 1},{stats.energy_trace[k + 1]},{stats.flips[k]}\n")
    snapshot_files = {}
    for k in sorted(stats.snapshots):
        label = "initial" if k == 0 else ("final" if k == stats.sweeps else f"sweep{k:05d}")
        snapshot_files[str(k)] = _write_snapshot(problem, stats.snapshots[k], out / f"state_{label}")

    score = problem.score(stats.final_state)
    reached = None if target is None else bool(stats.converged_sweep is not None)
    solution = {"kind": problem.kind, "problem": str(problem.source), "spins": [int(v) for v in stats.final_state],
                **score}
    _write_json(out / "solution.json", solution)
    summary = {
        "kind": problem.kind,
        "problem": str(problem.source),
        "seed": seed,
        "params_digest": params.digest(),
        "schedule": schedule.to_text(),
        "backend": backend.describe(),
        "order": args.order,
        "max_sweeps": args.sweeps,
        "target_energy": target,
        "target_reached": reached,
        "oracle_energy": oracle.energy if oracle is not None else None,
        "snapshots": snapshot_files,
        "iterations": {"sweeps": stats.sweeps, "spin_updates": stats.updates},
        "version": __version__,
        **stats.summary(),
        **{k: v for k, v in score.items() if k != "energy"},
    }
    _write_json(out / "summary.json", summary)
    line = f"seed {seed}; H = {stats.final_energy} after {stats.sweeps} sweeps; {stats.ledger.total_J * 1e12:.4g} pJ"
    if "cut_value" in score:
        line += f"; cut = {score['cut_value']}"
    if "penalty" in score:
        line += f"; penalty = {score['penalty']}; proper = {score['coloring']['proper']}"
    if "pixel_agreement" in score:
        line += f"; pixel agreement = {score['pixel_agreement']:.3f}"
    print(line)
    if args.strict:
        ok = reached if reached is not None else problem.solved(stats.final_state)
        if ok is False:
            return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_verify(args):
    try:
        solution = json.loads(Path(args.solution).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.solution}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    kind = args.kind or solution.get("kind")
    if kind not in KINDS:
        raise CliError("solution does not name its kind; pass --kind")
    problem = load_problem(kind, args.problem)
    if "spins" not in solution:
        raise CliError(f"{args.solution}: missing 'spins'")
    s = np.asarray(solution["spins"])
    if s.shape != (problem.graph.n,) or not np.all(np.abs(s) == 1):
        raise CliError(f"{args.solution}: spins must be {problem.graph.n} values of +1/-1")
    s = s.astype(np.int64)
    recomputed = problem.score(s)
    mismatches = {}
    for key, value in recomputed.items():
        if key in solution and solution[key] != value:
            mismatches[key] = {"declared": solution[key], "recomputed": value}
    report = {"kind": kind, "problem": str(args.problem), "recomputed": recomputed, "mismatches": mismatches}
    if args.oracle:
        try:
            gs = brute_force(problem.graph)
        except OracleSizeError as exc:
            raise CliError(f"--oracle refused: {exc}") from None
        report["oracle_energy"] = gs.energy
        report["optimal"] = recomputed["energy"] == gs.energy
    report["verified"] = not mismatches
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if not mismatches else EXIT_FAILED


def cmd_oracle(args):
    problem = load_problem(args.kind, args.problem)
    try:
        gs = brute_force(problem.graph, limit=args.limit)
    except OracleSizeError as exc:
        raise CliError(str(exc)) from None
    report = {"kind": args.kind, "problem": str(args.problem), "n_spins": problem.graph.n,
              "ground_energy": gs.energy, "n_ground_states": int(len(gs.states)),
              "ground_states": [[int(v) for v in st] for st in gs.states[: args.max_states]],
              "best_score": problem.score(gs.states[0])}
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        out = _out_dir(args)
        (out / "oracle.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="spinhall-ising", description="SHE-MTJ Ising machine simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--seed", type=int, default=None, help="64-bit seed (random and reported if omitted)")
        sp.add_argument("--params", default=None, help="device parameter file (searched in $SPINHALL_ISING_PARAMS_DIR)")
        sp.add_argument("--out", default=out_default, help="output directory")
        sp.add_argument("--config", default=None, help="JSON file with option defaults")

    dev = sub.add_parser("device", help="device characterization")
    dsub = dev.add_subparsers(dest="device_command", required=True)

    sw = dsub.add_parser("sweep", help="Monte-Carlo switching-probability sweep")
    common(sw, "device_sweep")
    sw.add_argument("--sweep", default=":".join(str(v) for v in DEFAULT_SWEEP_uA), help="I_min:I_max:step in uA")
    sw.add_argument("--trials", type=int, default=10000)
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--dt", type=float, default=1e-13, help="integrator step (s)")
    sw.add_argument("--quiet", action="store_true")
    sw.set_defaults(func=cmd_device_sweep)

    cal = dsub.add_parser("calibrate", help="tune the torque scale for a target switching point")
    common(cal, "device_calibrate")
    cal.add_argument("--target-current", type=float, default=90.0, help="uA")
    cal.add_argument("--target-p", type=float, default=0.5)
    cal.add_argument("--trials", type=int, default=4000)
    cal.add_argument("--threads", type=int, default=1)
    cal.add_argument("--dt", type=float, default=1e-13)
    cal.add_argument("--scale-min", type=float, default=1.0)
    cal.add_argument("--scale-max", type=float, default=8.0)
    cal.set_defaults(func=cmd_device_calibrate)

    so = sub.add_parser("solve", help="anneal a problem instance")
    so.add_argument("kind", choices=KINDS)
    so.add_argument("problem", help="edge list (maxcut), JSON or demo:NAME (coloring), PGM or glyphs:0,1 (digits)")
    common(so, "solve_out")
    so.add_argument("--backend", choices=("curve", "llg", "majority"), default="curve")
    so.add_argument("--curve", default=None, help="switching curve CSV (default: shipped curve)")
    so.add_argument("--sweeps", type=int, default=500)
    so.add_argument("--schedule", default=None, help="phases as start:I_min-I_max,... in uA")
    so.add_argument("--order", choices=ORDER_POLICIES, default="sequential")
    so.add_argument("--target-energy", type=int, default=None)
    so.add_argument("--oracle", action="store_true", help="stop at the exhaustive ground energy")
    so.add_argument("--strict", action="store_true", help="non-zero exit when the run does not converge")
    so.add_argument("--threads", type=int, default=1, help="accepted for uniformity; a run is serial")
    so.set_defaults(func=cmd_solve)

    ve = sub.add_parser("verify", help="recompute a solution's energy and score")
    ve.add_argument("problem")
    ve.add_argument("solution")
    ve.add_argument("--kind", choices=KINDS, default=None)
    ve.add_argument("--oracle", action="store_true")
    ve.set_defaults(func=cmd_verify)

    orc = sub.add_parser("oracle", help="exhaustive ground states")
    orc.add_argument("kind", choices=KINDS)
    orc.add_argument("problem")
    orc.add_argument("--limit", type=int, default=24)
    orc.add_argument("--max-states", type=int, default=16)
    orc.add_argument("--out", default=None)
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sp = _subparser(parser, args)
        _apply_config(args, sp)
        return args.func(args)
    except (CliError, ParamFileError, GraphFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


def _subparser(parser, args):
    # the parser that owns the chosen command's defaults
    actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    sp = actions[0].choices[args.command]
    if args.command == "device":
        inner = [a for a in sp._actions if isinstance(a, argparse._SubParsersAction)][0]
        sp = inner.choices[args.device_command]
    return sp


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
