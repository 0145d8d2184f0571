"""Effective-field terms for the free-layer macrospin.

All fields are in A/m.  The default frame puts the easy axis along x (long
ellipse axis), the short in-plane axis along y and the film normal along z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..constants import CONSTANTS, PhysicalConstants
from .demag import thin_film_ellipse_factors


@dataclass(frozen=True)
class MaterialParams:
    M_s: float
    alpha: float
    T: float
    constants: PhysicalConstants = CONSTANTS

    def __post_init__(self):
        if not self.M_s > 0:
            raise ValueError("M_s must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.T < 0:
            raise ValueError("T must be non-negative")

    @property
    def gamma(self):
        return self.constants.gamma


@dataclass(frozen=True)
class Geometry:
    """Elliptical free layer; axes are full lengths in metres."""

    axis_a: float
    axis_b: float
    t_FL: float

    def __post_init__(self):
        if not (self.axis_a > 0 and self.axis_b > 0 and self.t_FL > 0):
            raise ValueError("geometry dimensions must be positive")

    @property
    def volume(self):
        return 0.25 * math.pi * self.axis_a * self.axis_b * self.t_FL

    def spin_count(self, M_s, constants=CONSTANTS):
        return M_s * self.volume / constants.mu_B


@dataclass(frozen=True)
class AnisotropyModel:
    easy_axis: np.ndarray
    H_k: float
    demag_diag: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        e = np.asarray(self.easy_axis, dtype=float)
        n = np.asarray(self.demag_diag, dtype=float)
        if e.shape != (3,) or abs(np.linalg.norm(e) - 1.0) > 1e-12:
            raise ValueError("easy_axis must be a unit 3-vector")
        if n.shape != (3,) or np.any(n < 0) or np.any(n > 1) or abs(n.sum() - 1.0) > 1e-9:
            raise ValueError("demag factors must lie in [0, 1] and sum to 1")
        if self.H_k < 0:
            raise ValueError("H_k must be non-negative")
        object.__setattr__(self, "easy_axis", e)
        object.__setattr__(self, "demag_diag", n)


def demag_field(m, aniso: AnisotropyModel, M_s):
    return -M_s * aniso.demag_diag * np.asarray(m, dtype=float)


def anisotropy_field(m, aniso: AnisotropyModel):
    e = aniso.easy_axis
    return aniso.H_k * float(np.dot(m, e)) * e


def deterministic_field(m, aniso: AnisotropyModel, M_s):
    return anisotropy_field(m, aniso) + demag_field(m, aniso, M_s)


def energy_density(m, aniso: AnisotropyModel, M_s, constants=CONSTANTS):
    """Anisotropy plus self-demag energy per volume (J/m^3).

    ``m`` may be a single vector or an array of shape (..., 3).
    """
    m = np.asarray(m, dtype=float)
    along = m @ aniso.easy_axis
    demag = np.sum(aniso.demag_diag * m * m, axis=-1)
    return constants.mu_0 * M_s * (-0.5 * aniso.H_k * along**2 + 0.5 * M_s * demag)


def in_plane_hard_axis(aniso: AnisotropyModel):
    """Unit vector perpendicular to the easy axis with the smallest demag factor."""
    best = None
    for k in range(3):
        axis = np.zeros(3)
        axis[k] = 1.0
        if abs(np.dot(axis, aniso.easy_axis)) > 1e-12:
            continue
        if best is None or aniso.demag_diag[k] < aniso.demag_diag[best]:
            best = k
    axis = np.zeros(3)
    axis[best] = 1.0
    return axis


def energy_barrier(aniso: AnisotropyModel, M_s, volume, constants=CONSTANTS):
    """Saddle-minus-minimum energy (J) for an easy axis along a demag principal axis."""
    hard = in_plane_hard_axis(aniso)
    e = aniso.easy_axis
    return volume * (energy_density(hard, aniso, M_s, constants) - energy_density(e, aniso, M_s, constants))


def calibrate_H_k(E_B, M_s, volume, demag_diag, easy_index=0, constants=CONSTANTS):
    """Uniaxial field that makes the total barrier equal ``E_B`` joules.

    The barrier is ``mu0 M_s V / 2 * (H_k + M_s (N_hard - N_easy))``, where the
    second term is the in-plane shape anisotropy of the ellipse.  With equal
    in-plane factors this is ``H_k = 2 E_B / (mu0 M_s V)``.
    """
    n = np.asarray(demag_diag, dtype=float)
    others = [k for k in range(3) if k != easy_index]
    n_hard = min(n[k] for k in others)
    shape = M_s * (n_hard - n[easy_index])
    h_k = 2.0 * E_B / (constants.mu_0 * M_s * volume) - shape
    if h_k < 0:
        raise ValueError(
            f"shape anisotropy alone exceeds the requested barrier (H_k would be {h_k:.4g} A/m)"
        )
    return h_k


def thermal_sigma(material: MaterialParams, geometry: Geometry, dt):
    """Per-component standard deviation of the thermal field (A/m)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    c = material.constants
    a = material.alpha
    var = (a / (1.0 + a * a)) * 2.0 * c.k_B * material.T / (
        material.gamma * c.mu_0 * material.M_s * geometry.volume * dt
    )
    return math.sqrt(var)


def thermal_field(material: MaterialParams, geometry: Geometry, dt, rng: np.random.Generator, size=None):
    """Draw a thermal field sample (shape (3,) or ``size + (3,)``)."""
    sigma = thermal_sigma(material, geometry, dt)
    shape = (3,) if size is None else tuple(np.atleast_1d(size)) + (3,)
    if sigma == 0.0:
        return np.zeros(shape)
    return sigma * rng.standard_normal(shape)


def spin_current(I_q, theta_SH, W_MTJ, t_HM, polarization_axis):
    """Spin current vector (A) injected into the free layer by the heavy metal.

    Magnitude ``theta_SH * (W_MTJ / t_HM) * |I_q|``; direction ``+sigma`` for
    positive charge current and ``-sigma`` for negative.
    """
    if not t_HM > 0:
        raise ValueError("t_HM must be positive")
    sigma = np.asarray(polarization_axis, dtype=float)
    return theta_SH * (W_MTJ / t_HM) * float(I_q) * sigma


def default_anisotropy(geometry: Geometry, M_s, E_B):
    """Thin-film demag factors plus a calibrated easy-axis field along x."""
    nd = thin_film_ellipse_factors(geometry.axis_a, geometry.axis_b, geometry.t_FL)
    h_k = calibrate_H_k(E_B, M_s, geometry.volume, nd, easy_index=0)
    return AnisotropyModel(easy_axis=np.array([1.0, 0.0, 0.0]), H_k=h_k, demag_diag=nd)
