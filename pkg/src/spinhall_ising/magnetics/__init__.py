"""Stochastic macrospin physics for the SHE-MTJ free layer."""

from .demag import surface_integral_factors, thin_film_ellipse_factors
from .fields import (
    AnisotropyModel,
    Geometry,
    MaterialParams,
    anisotropy_field,
    calibrate_H_k,
    default_anisotropy,
    demag_field,
    energy_barrier,
    energy_density,
    spin_current,
    thermal_field,
    thermal_sigma,
)
from ..rng import RngStream
from .llg import (
    IntegratorConfig,
    Macrospin,
    MagnetizationState,
    NonFiniteStateError,
    PswEstimate,
    WriteEvent,
    WritePulse,
    estimate_psw,
    llg_step,
    save_trajectory_csv,
    simulate_write_event,
    thermalize,
    wilson_interval,
    write_trials,
)
