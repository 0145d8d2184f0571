"""Behavioral SHE-MTJ cell.

Read-out through a resistive divider, the switching-probability curve (its
Monte-Carlo generation, persistence and lookup), the torque-scale calibration
and per-operation energy accounting.

Logical state convention: parallel (low resistance) is ``+1``, antiparallel
is ``-1``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .magnetics.llg import IntegratorConfig, Macrospin, NonFiniteStateError, estimate_psw, wilson_interval, write_trials
from .params import DeviceParams
from .rng import named_stream

CURVE_COLUMNS = ("I_uA", "p", "ci_lo", "ci_hi")
DEFAULT_SWEEP_uA = (40, 160, 5)
# a curve point with fewer trials than this is flagged as low-statistics
MIN_RELIABLE_TRIALS = 100

_DATA_DIR = Path(__file__).with_name("data")
SHIPPED_CURVE = _DATA_DIR / "switch_curve.csv"


# ----------------------------------------------------------------------------
# read-out


@dataclass(frozen=True)
class ResistanceModel:
    R_P: float
    R_AP: float
    R_REF: float | None = None

    def __post_init__(self):
        if not 0 < self.R_P < self.R_AP:
            raise ValueError("require 0 < R_P < R_AP")
        if self.R_REF is None:
            object.__setattr__(self, "R_REF", math.sqrt(self.R_P * self.R_AP))
        if not self.R_P < self.R_REF < self.R_AP:
            raise ValueError("R_REF must lie strictly between R_P and R_AP")

    @classmethod
    def from_params(cls, params: DeviceParams, R_REF=None):
        return cls(params.R_P, params.R_AP, R_REF)

    def resistance(self, spin):
        if spin == 1:
            return self.R_P
        if spin == -1:
            return self.R_AP
        raise ValueError(f"spin must be +1 or -1, got {spin!r}")


def divider_voltage(resistance, model: ResistanceModel, V_DD):
    """Midpoint of the MTJ / reference-resistor divider."""
    return V_DD * resistance / (resistance + model.R_REF)


def read_state(true_resistance, model: ResistanceModel, V_DD=1.0):
    """Sense the cell: ``+1`` for parallel, ``-1`` for antiparallel."""
    r = float(true_resistance)
    if not (math.isclose(r, model.R_P, rel_tol=1e-9) or math.isclose(r, model.R_AP, rel_tol=1e-9)):
        raise ValueError(f"resistance {r:g} Ohm is neither R_P={model.R_P:g} nor R_AP={model.R_AP:g}")
    if not V_DD > 0:
        raise ValueError("V_DD must be positive")
    return 1 if divider_voltage(r, model, V_DD) < 0.5 * V_DD else -1


def magnetization_to_spin(m, easy_axis):
    """Free layer along ``+easy_axis`` is taken as the parallel state."""
    return 1 if float(np.dot(m, easy_axis)) > 0 else -1


# ----------------------------------------------------------------------------
# switching curve


@dataclass(frozen=True)
class SwitchCurve:
    """Sampled ``P_SW(I)``.  Currents are stored in microamperes, exactly as persisted."""

    I_uA: np.ndarray
    p: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        arrays = []
        for name in CURVE_COLUMNS:
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            arrays.append(a)
            object.__setattr__(self, name, a)
        n = len(arrays[0])
        if n == 0 or any(len(a) != n for a in arrays):
            raise ValueError("curve columns must be non-empty and of equal length")
        if np.any(np.diff(self.I_uA) <= 0):
            raise ValueError("currents must be strictly increasing")
        if np.any((self.p < 0) | (self.p > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def currents(self):
        """Sweep currents in amperes."""
        return self.I_uA * 1e-6

    def __len__(self):
        return len(self.I_uA)

    def is_monotone(self):
        return bool(np.all(np.diff(self.p) >= 0))

    def monotone_within_ci(self):
        """True when every decrease between neighbours is covered by overlapping 95% intervals."""
        for k in range(len(self) - 1):
            if self.p[k + 1] < self.p[k] and self.ci_hi[k + 1] < self.ci_lo[k]:
                return False
        return True

    def save(self, path):
        """Write ``path`` (CSV) and ``path.json`` metadata; ``repr`` keeps floats exact."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CURVE_COLUMNS)
            for row in zip(self.I_uA, self.p, self.ci_lo, self.ci_hi):
                w.writerow([repr(float(v)) for v in row])
        metadata_path(path).write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != CURVE_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(CURVE_COLUMNS)}")
        cols = list(zip(*[[float(v) for v in r] for r in rows[1:] if r]))
        if not cols:
            raise ValueError(f"{path}: no curve points")
        meta_file = metadata_path(path)
        meta = json.loads(meta_file.read_text()) if meta_file.exists() else {}
        return cls(*cols, metadata=meta)

    def merged(self, other: "SwitchCurve"):
        """Union of two curves; points of ``other`` win at shared currents."""
        table = {float(i): row for i, *row in zip(self.I_uA, self.p, self.ci_lo, self.ci_hi)}
        table.update({float(i): row for i, *row in zip(other.I_uA, other.p, other.ci_lo, other.ci_hi)})
        keys = sorted(table)
        meta = dict(self.metadata)
        meta.update(other.metadata)
        return SwitchCurve(keys, *zip(*(table[k] for k in keys)), metadata=meta)


def metadata_path(csv_path):
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.name + ".json")


def load_shipped_curve():
    """The curve calibrated for the default reference device."""
    return SwitchCurve.load(SHIPPED_CURVE)


def sweep_currents_uA(I_min_uA, I_max_uA, step_uA):
    """Inclusive sweep grid in microamperes, built on an integer nA lattice."""
    if not step_uA > 0:
        raise ValueError("sweep step must be positive")
    if I_max_uA < I_min_uA:
        raise ValueError("sweep end below sweep start")
    lo, hi, st = (int(round(v * 1000)) for v in (I_min_uA, I_max_uA, step_uA))
    if st == 0:
        raise ValueError("sweep step below 1 nA")
    return np.arange(lo, hi + 1, st) / 1000.0


def _point_stream(seed, I_uA):
    # keyed by the current itself so a point's trials do not depend on the grid
    return named_stream(seed, "device", int(round(I_uA * 1000)))


def calibrate_switch_curve(currents_uA, n_trials, model: Macrospin, seed, pulse_timing=(3e-9, 6e-9),
                           config: IntegratorConfig | None = None, engine=None, threads=1, progress=None):
    """Estimate ``P_SW`` at each current (given in microamperes) and return a :class:`SwitchCurve`.

    ``progress``, when given, is called with each finished point's estimate.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    config = config or IntegratorConfig()
    I_uA = np.asarray(currents_uA, dtype=float)
    p, lo, hi = [], [], []
    for cur in I_uA:
        try:
            est = estimate_psw(cur * 1e-6, n_trials, model, _point_stream(seed, cur), pulse_timing, config,
                               engine=engine, threads=threads)
        except NonFiniteStateError as exc:
            raise NonFiniteStateError(f"integrator failure at I = {cur:g} uA: {exc}", current=cur * 1e-6) from exc
        p.append(est.p_hat)
        lo.append(est.ci95[0])
        hi.append(est.ci95[1])
        if progress is not None:
            progress(est)
    meta = {
        "n_trials": int(n_trials),
        "t_write": pulse_timing[0],
        "t_relax": pulse_timing[1],
        "dt": config.dt,
        "burn_in": config.burn_in,
        "settle_margin_kT": config.settle_margin_kT,
        "torque_scale": model.torque_scale,
        "seed": int(seed),
        "low_statistics": bool(n_trials < MIN_RELIABLE_TRIALS),
    }
    return SwitchCurve(I_uA, p, lo, hi, metadata=meta)


def crossing_current(curve: SwitchCurve, level=0.5):
    """First current (A) where the piecewise-linear curve reaches ``level``."""
    p = curve.p
    idx = np.flatnonzero(p >= level)
    if idx.size == 0:
        raise ValueError(f"curve never reaches p = {level}")
    k = int(idx[0])
    if k == 0:
        return float(curve.currents[0])
    i0, i1 = curve.I_uA[k - 1], curve.I_uA[k]
    frac = (level - p[k - 1]) / (p[k] - p[k - 1])
    return float(i0 + frac * (i1 - i0)) * 1e-6


def psw_lookup(curve: SwitchCurve, I):
    """Linear interpolation of the curve at current(s) ``I`` in amperes; no extrapolation."""
    I_uA = np.asarray(I, dtype=float) * 1e6
    lo, hi = curve.I_uA[0], curve.I_uA[-1]
    slack = 1e-9 * max(abs(lo), abs(hi))
    if np.any(I_uA < lo - slack) or np.any(I_uA > hi + slack):
        raise ValueError(f"current outside the calibrated range [{lo:g}, {hi:g}] uA")
    out = np.interp(np.clip(I_uA, lo, hi), curve.I_uA, curve.p)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# torque-scale calibration


@dataclass(frozen=True)
class TorqueCalibration:
    scale: float
    flips: int
    n_trials: int
    history: tuple  # (scale, flips) per bisection step


def calibrate_torque_scale(model: Macrospin, seed, I_target=90e-6, p_target=0.5, n_trials=4000,
                           bracket=(1.0, 8.0), rel_tol=1e-3, pulse_timing=(3e-9, 6e-9),
                           config: IntegratorConfig | None = None, engine=None, threads=1):
    """Bisect the torque scale so that ``P_SW(I_target) = p_target``.

    Every evaluation reuses the same trial generators (common random numbers),
    which makes the flip count a near-monotone step function of the scale.
    """
    config = config or IntegratorConfig()
    stream = named_stream(seed, "calibration")
    target = p_target * n_trials

    def flips_at(scale):
        gens = stream.trial_generators(n_trials)
        return int(write_trials(I_target, gens, model.with_torque_scale(scale), pulse_timing, config,
                                engine=engine, threads=threads).sum())

    lo, hi = bracket
    f_lo, f_hi = flips_at(lo), flips_at(hi)
    history = [(lo, f_lo), (hi, f_hi)]
    if not f_lo <= target <= f_hi:
        raise ValueError(f"bracket {bracket} does not straddle p = {p_target} (flips {f_lo}, {f_hi})")
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        f_mid = flips_at(mid)
        history.append((mid, f_mid))
        if f_mid < target:
            lo = mid
        else:
            hi = mid
    scale = 0.5 * (lo + hi)
    best = min(history, key=lambda h: abs(h[1] - target))
    return TorqueCalibration(scale=scale, flips=best[1], n_trials=n_trials, history=tuple(history))


# ----------------------------------------------------------------------------
# energy


@dataclass
class EnergyLedger:
    """Energy in joules, split by operation; ``updates`` counts accounted updates."""

    write_J: float = 0.0
    read_J: float = 0.0
    relax_J: float = 0.0
    overhead_J: float = 0.0
    updates: int = 0

    def __post_init__(self):
        for name in ("write_J", "read_J", "relax_J", "overhead_J"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total_J(self):
        return self.write_J + self.read_J + self.relax_J + self.overhead_J

    def add(self, other: "EnergyLedger"):
        """Accumulate ``other`` in place."""
        self.write_J += other.write_J
        self.read_J += other.read_J
        self.relax_J += other.relax_J
        self.overhead_J += other.overhead_J
        self.updates += other.updates
        return self

    def __add__(self, other):
        return EnergyLedger(
            self.write_J + other.write_J,
            self.read_J + other.read_J,
            self.relax_J + other.relax_J,
            self.overhead_J + other.overhead_J,
            self.updates + other.updates,
        )

    def to_dict(self):
        return {
            "write_pJ": self.write_J * 1e12,
            "read_pJ": self.read_J * 1e12,
            "relax_pJ": self.relax_J * 1e12,
            "overhead_pJ": self.overhead_J * 1e12,
            "total_pJ": self.total_J * 1e12,
            "updates": self.updates,
        }


def account_energy(I_write, I_read, timings, V_DD, overhead_J=0.01e-12):
    """Energy of one read-write update.

    ``timings`` is ``(t_write, t_relax, t_read)``.  Relaxation draws no
    supply current; it and the CMOS switching are lumped into ``overhead_J``.
    """
    t_write, t_relax, t_read = timings
    for name, v in (("I_write", I_write), ("I_read", I_read), ("t_write", t_write), ("t_relax", t_relax),
                    ("t_read", t_read), ("V_DD", V_DD), ("overhead_J", overhead_J)):
        if v < 0:
            raise ValueError(f"{name} must be non-negative")
    return EnergyLedger(
        write_J=V_DD * I_write * t_write,
        read_J=V_DD * I_read * t_read,
        relax_J=0.0,
        overhead_J=overhead_J,
        updates=1,
    )


def params_energy(params: DeviceParams, I_write):
    return account_energy(I_write, params.I_read, (params.t_PW, params.t_relax, params.t_read), params.V_DD,
                          params.overhead_J)


__all__ = [
    "CURVE_COLUMNS",
    "DEFAULT_SWEEP_uA",
    "EnergyLedger",
    "ResistanceModel",
    "SHIPPED_CURVE",
    "SwitchCurve",
    "TorqueCalibration",
    "account_energy",
    "calibrate_switch_curve",
    "calibrate_torque_scale",
    "crossing_current",
    "divider_voltage",
    "load_shipped_curve",
    "magnetization_to_spin",
    "metadata_path",
    "params_energy",
    "psw_lookup",
    "read_state",
    "sweep_currents_uA",
    "wilson_interval",
]
