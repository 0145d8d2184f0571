"""Stochastic LLG integration with Slonczewski torque, write events and P_SW estimation."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .._accel import resolve_engine
from ..constants import CONSTANTS
from ..params import DeviceParams
from ..rng import RngStream
from . import kernels, kernels_numpy
from .fields import (
    AnisotropyModel,
    Geometry,
    MaterialParams,
    default_anisotropy,
    energy_density,
    in_plane_hard_axis,
    spin_current,
    thermal_sigma,
)

MAX_DT = 1e-12


class NonFiniteStateError(FloatingPointError):
    """The integrator produced NaN/Inf, usually because dt is too large."""

    def __init__(self, message, current=None):
        self.current = current
        super().__init__(message)


@dataclass
class MagnetizationState:
    m: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float).copy()
        if self.m.shape != (3,):
            raise ValueError("m must be a 3-vector")


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings.

    ``settle_margin_kT``: during the relax phase of Monte-Carlo trials the
    trajectory is stopped once the magnet sits this many kT below the saddle
    energy; the outcome is then fixed up to an escape probability of order
    ``exp(-margin)``.  ``None`` runs every relax step.
    """

    dt: float = 1e-13
    scheme: str = "heun"
    renormalize: bool = True
    burn_in: float = 1e-9
    settle_margin_kT: float | None = 20.0

    def __post_init__(self):
        if not 0 < self.dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}] s")
        if self.scheme != "heun":
            raise ValueError("only the 'heun' predictor-corrector scheme is implemented")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")

    def steps(self, duration):
        return int(round(duration / self.dt))


@dataclass(frozen=True)
class WritePulse:
    I_q: float
    t_write: float = 3e-9
    t_relax: float = 6e-9

    def __post_init__(self):
        if self.t_write < 0 or self.t_relax < 0:
            raise ValueError("pulse durations must be non-negative")


@dataclass(frozen=True)
class Macrospin:
    """Everything the integrator needs about one free layer."""

    material: MaterialParams
    geometry: Geometry
    aniso: AnisotropyModel
    polarization: np.ndarray
    spin_hall_gain: float
    torque_scale: float = 1.0
    constants: object = field(default=CONSTANTS, repr=False)

    @classmethod
    def from_params(cls, params: DeviceParams, aniso: AnisotropyModel | None = None):
        c = CONSTANTS
        material = MaterialParams(M_s=params.M_s, alpha=params.alpha, T=params.T)
        geometry = Geometry(params.fl_long_axis, params.fl_short_axis, params.t_FL)
        if aniso is None:
            e_b = params.E_B_kT * c.k_B * params.T
            aniso = default_anisotropy(geometry, params.M_s, e_b)
        if params.polarization == "easy":
            pol = aniso.easy_axis.copy()
        else:
            pol = np.zeros(3)
            pol["xyz".index(params.polarization)] = 1.0
        return cls(
            material=material,
            geometry=geometry,
            aniso=aniso,
            polarization=pol,
            spin_hall_gain=params.spin_hall_gain,
            torque_scale=params.torque_scale,
        )

    def with_temperature(self, T):
        """Same device (same H_k) at another temperature."""
        return replace(self, material=replace(self.material, T=T))

    def with_torque_scale(self, scale):
        return replace(self, torque_scale=scale)

    @property
    def spin_count(self):
        return self.geometry.spin_count(self.material.M_s, self.constants)

    @property
    def easy_axis(self):
        return self.aniso.easy_axis

    def spin_current(self, I_q):
        return self.spin_hall_gain * float(I_q) * self.polarization

    def torque_vector(self, I_q):
        """Spin-torque rate ``scale * I_s / (q N_s)`` in 1/s."""
        return self.torque_scale * self.spin_current(I_q) / (self.constants.q * self.spin_count)

    def field(self, m, h_thermal=None):
        m = np.asarray(m, dtype=float)
        e = self.aniso.easy_axis
        h = self.aniso.H_k * float(m @ e) * e - self.material.M_s * self.aniso.demag_diag * m
        return h if h_thermal is None else h + h_thermal

    def energy(self, m):
        """Magnetic energy (J) of orientation(s) ``m``."""
        return self.geometry.volume * energy_density(m, self.aniso, self.material.M_s, self.constants)

    def barrier(self):
        hard = in_plane_hard_axis(self.aniso)
        return self.energy(hard) - self.energy(self.aniso.easy_axis)

    def kernel_params(self, dt):
        a = self.material.alpha
        ms = self.material.M_s
        p = np.empty(kernels.N_PARAMS)
        p[0:3] = self.aniso.easy_axis
        p[3] = self.aniso.H_k
        p[4:7] = ms * self.aniso.demag_diag
        p[7] = self.material.gamma / (1.0 + a * a)
        p[8] = 1.0 / (1.0 + a * a)
        p[9] = a
        p[10] = thermal_sigma(self.material, self.geometry, dt)
        p[11] = dt
        return p

    def settle_level(self, margin_kT):
        """Reduced-energy threshold below which a relaxing magnet counts as trapped."""
        if margin_kT is None:
            return -math.inf
        c = self.constants
        ms = self.material.M_s
        saddle = self.energy(in_plane_hard_axis(self.aniso)) / (c.mu_0 * ms * self.geometry.volume)
        kt = c.k_B * self.material.T / (c.mu_0 * ms * self.geometry.volume)
        return saddle - margin_kT * kt


def llg_step(state, h_eff, i_s, material: MaterialParams, geometry: Geometry, config: IntegratorConfig,
             torque_scale=1.0, constants=CONSTANTS):
    """Advance ``state`` by one Heun step of length ``config.dt``.

    ``h_eff`` is the effective field including this step's thermal sample:
    either a 3-vector held over the step or a callable ``m -> field``, which
    lets the corrector stage re-evaluate demag and anisotropy terms.
    ``i_s`` is the spin-current vector in amperes.
    """
    m = np.asarray(state.m, dtype=float)
    a = material.alpha
    c = material.gamma / (1.0 + a * a)
    k = 1.0 / (1.0 + a * a)
    n_s = geometry.spin_count(material.M_s, constants)
    torque = torque_scale * np.asarray(i_s, dtype=float) / (constants.q * n_s)
    field_at = h_eff if callable(h_eff) else (lambda _m, h=np.asarray(h_eff, dtype=float): h)

    def f(v):
        return kernels_numpy.rhs(v[None, :], np.asarray(field_at(v), dtype=float)[None, :], torque, c, k, a)[0]

    dt = config.dt
    d1 = f(m)
    pred = m + dt * d1
    if config.renormalize:
        pred = pred / np.linalg.norm(pred)
    d2 = f(pred)
    new = m + 0.5 * dt * (d1 + d2)
    if config.renormalize:
        new = new / np.linalg.norm(new)
    if not np.all(np.isfinite(new)):
        raise NonFiniteStateError(f"non-finite magnetization after step at t={state.t:.3e} s (dt too large?)")
    return MagnetizationState(new, state.t + dt)


@dataclass
class WriteEvent:
    final: MagnetizationState
    flipped: bool
    trajectory: np.ndarray | None = None  # columns t, m_x, m_y, m_z, I_q


def _segments(model, pulse, config):
    return [
        (config.steps(pulse.t_write), model.torque_vector(pulse.I_q), pulse.I_q),
        (config.steps(pulse.t_relax), np.zeros(3), 0.0),
    ]


def simulate_write_event(initial: MagnetizationState, pulse: WritePulse, model: Macrospin,
                         config: IntegratorConfig, rng: np.random.Generator, record_every=None, engine=None):
    """Apply ``pulse`` (write then relax) starting from ``initial``.

    Every relax step is executed.  ``record_every`` (in steps) enables the
    trajectory, sampled as rows ``(t, m_x, m_y, m_z, I_q)``.
    """
    engine = resolve_engine(engine)
    p = model.kernel_params(config.dt)
    m = np.array(initial.m, dtype=float)
    e = model.easy_axis
    start_sign = np.sign(m @ e)
    rows = [] if record_every else None
    if rows is not None:
        rows.append(np.array([[initial.t, *m, pulse.I_q]]))
    t = initial.t
    for n_steps, torque, current in _segments(model, pulse, config):
        n_rec = n_steps // record_every if record_every else 0
        if engine == "numba":
            out = np.zeros((n_rec, 3))
            _, ok, _ = kernels.run_segment(rng, m, n_steps, torque, p, -math.inf, record_every or 0, out)
        else:
            out = np.zeros((1, n_rec, 3))
            mb = m[None, :].copy()
            _, okb, _ = kernels_numpy.run_segment([rng], mb, n_steps, torque, p, -math.inf, record_every or 0, out)
            m[:] = mb[0]
            ok, out = bool(okb[0]), out[0]
        if not ok:
            raise NonFiniteStateError("non-finite magnetization during write event", current=pulse.I_q)
        if rows is not None and n_rec:
            times = t + config.dt * record_every * np.arange(1, n_rec + 1)
            rows.append(np.column_stack([times, out, np.full(n_rec, current)]))
        t += n_steps * config.dt
    final = MagnetizationState(m, t)
    flipped = bool(np.sign(m @ e) != start_sign)
    traj = np.vstack(rows) if rows is not None else None
    return WriteEvent(final=final, flipped=flipped, trajectory=traj)


def thermalize(model: Macrospin, config: IntegratorConfig, rng, sign=1, engine=None):
    """Zero-current burn-in of ``config.burn_in`` from the exact well minimum."""
    engine = resolve_engine(engine)
    p = model.kernel_params(config.dt)
    m = sign * model.easy_axis.astype(float)
    n = config.steps(config.burn_in)
    if engine == "numba":
        _, ok, _ = kernels.run_segment(rng, m, n, np.zeros(3), p, -math.inf, 0, np.empty((0, 3)))
    else:
        mb = m[None, :].copy()
        _, okb, _ = kernels_numpy.run_segment([rng], mb, n, np.zeros(3), p)
        m, ok = mb[0], bool(okb[0])
    if not ok:
        raise NonFiniteStateError("non-finite magnetization during burn-in")
    return MagnetizationState(m, config.burn_in)


def write_trials(I_q, gens, model: Macrospin, pulse_timing=(3e-9, 6e-9), config=None,
                 start_sign=1, engine=None, threads=1):
    """Run one thermalized write trial per generator; return the flip flags.

    Each trial starts at ``start_sign * easy_axis``, is burned in at zero
    current, then receives a pulse of magnitude ``|I_q|`` driving it toward
    the opposite well, then relaxes.
    """
    config = config or IntegratorConfig()
    engine = resolve_engine(engine)
    p = model.kernel_params(config.dt)
    e = model.easy_axis.astype(float)
    torque = model.torque_vector(-start_sign * abs(I_q))
    n_burn = config.steps(config.burn_in)
    n_write = config.steps(pulse_timing[0])
    n_relax = config.steps(pulse_timing[1])
    settle = model.settle_level(config.settle_margin_kT)
    n = len(gens)
    flips = np.zeros(n, dtype=bool)

    if engine == "numpy":
        m = np.tile(start_sign * e, (n, 1))
        _, ok = kernels_numpy.write_trials(gens, m, n_burn, n_write, n_relax, torque, p, settle)
        if not ok.all():
            raise NonFiniteStateError(f"non-finite magnetization at I_q={I_q:.4g} A", current=I_q)
        return np.sign(m @ e) != start_sign

    def one(i):
        m = start_sign * e.copy()
        _, ok = kernels.write_trial(gens[i], m, n_burn, n_write, n_relax, torque, p, settle)
        if not ok:
            raise NonFiniteStateError(f"non-finite magnetization at I_q={I_q:.4g} A", current=I_q)
        flips[i] = np.sign(m @ e) != start_sign

    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(n)))
    else:
        for i in range(n):
            one(i)
    return flips


def wilson_interval(k, n, confidence=0.95):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class PswEstimate:
    I_q: float
    p_hat: float
    ci95: tuple
    flips: int
    n_trials: int


def estimate_psw(I_q, n_trials, model: Macrospin, rng: RngStream, pulse_timing=(3e-9, 6e-9), config=None,
                 engine=None, threads=1):
    """Monte-Carlo switching probability for a pulse of magnitude ``|I_q|``."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    gens = rng.trial_generators(n_trials)
    flips = write_trials(I_q, gens, model, pulse_timing, config, engine=engine, threads=threads)
    k = int(flips.sum())
    return PswEstimate(float(I_q), k / n_trials, wilson_interval(k, n_trials), k, n_trials)


def save_trajectory_csv(trajectory, path):
    header = "t,m_x,m_y,m_z,I_q"
    np.savetxt(Path(path), np.asarray(trajectory), delimiter=",", header=header, comments="", fmt="%.10e")
