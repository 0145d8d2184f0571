"""Device parameters and the human-readable parameter file.

The file is ``key = value [unit]`` per line, ``#`` starts a comment.  Values
are converted to SI at load time, so 1257.3 emu/cm3 becomes 1.2573e6 A/m.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

PARAMS_DIR_ENV = "SPINHALL_ISING_PARAMS_DIR"

# Torque scale found by ``spinhall-ising device calibrate`` for the reference
# device (dt = 0.1 ps, 3 ns write + 6 ns relax, 50% switching at 90 uA).
CALIBRATED_TORQUE_SCALE = 3.446


class ParamFileError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())


# unit -> multiplier to SI
_UNITS = {
    "": 1.0,
    "m": 1.0,
    "nm": 1e-9,
    "um": 1e-6,
    "A/m": 1.0,
    "kA/m": 1e3,
    "emu/cm3": 1e3,
    "emu/cm^3": 1e3,
    "Ohm": 1.0,
    "kOhm": 1e3,
    "Ohm.m": 1.0,
    "Ohm*m": 1.0,
    "uOhm.cm": 1e-8,
    "uOhm*cm": 1e-8,
    "s": 1.0,
    "ns": 1e-9,
    "ps": 1e-12,
    "K": 1.0,
    "V": 1.0,
    "A": 1.0,
    "mA": 1e-3,
    "uA": 1e-6,
    "J": 1.0,
    "pJ": 1e-12,
    "kT": 1.0,
}

# field -> (file key, display unit, unit kind)
_FIELDS = {
    "fl_long_axis": ("free_layer_long_axis", "nm"),
    "fl_short_axis": ("free_layer_short_axis", "nm"),
    "t_FL": ("t_FL", "nm"),
    "t_HM": ("t_HM", "nm"),
    "M_s": ("M_s", "emu/cm3"),
    "theta_SH": ("theta_SH", ""),
    "alpha": ("alpha", ""),
    "E_B_kT": ("E_B", "kT"),
    "t_MgO": ("t_MgO", "nm"),
    "R_P": ("R_P", "kOhm"),
    "R_AP": ("R_AP", "kOhm"),
    "rho_HM": ("rho_HM", "uOhm.cm"),
    "t_PW": ("t_PW", "ns"),
    "T": ("T", "K"),
    "V_DD": ("V_DD", "V"),
    "W_MTJ": ("W_MTJ", "nm"),
    "polarization": ("polarization_axis", None),
    "torque_scale": ("torque_scale", ""),
    "t_relax": ("t_relax", "ns"),
    "t_read": ("t_read", "ns"),
    "I_read": ("I_read", "uA"),
    "overhead_J": ("overhead_energy", "pJ"),
}

_UNIT_KIND = {
    "nm": {"m", "nm", "um"},
    "emu/cm3": {"A/m", "kA/m", "emu/cm3", "emu/cm^3"},
    "kOhm": {"Ohm", "kOhm"},
    "uOhm.cm": {"Ohm.m", "Ohm*m", "uOhm.cm", "uOhm*cm"},
    "ns": {"s", "ns", "ps"},
    "K": {"K"},
    "V": {"V"},
    "uA": {"A", "mA", "uA"},
    "pJ": {"J", "pJ"},
    "kT": {"kT", ""},
    "": {""},
}


@dataclass(frozen=True)
class DeviceParams:
    """SHE-MTJ cell parameters in SI units (reference-device defaults).

    The easy axis is the long in-plane axis of the elliptical free layer.
    ``polarization`` selects the spin-polarization axis: ``"easy"`` (default),
    or one of ``"x"``, ``"y"``, ``"z"`` in the (long, short, normal) frame.
    """

    fl_long_axis: float = 112.5e-9
    fl_short_axis: float = 45e-9
    t_FL: float = 1.5e-9
    t_HM: float = 2.3e-9
    M_s: float = 1.2573e6
    theta_SH: float = 0.3
    alpha: float = 0.1
    E_B_kT: float = 60.0
    t_MgO: float = 1.4e-9
    R_P: float = 8.56e3
    R_AP: float = 18.31e3
    rho_HM: float = 2.0e-6
    t_PW: float = 3e-9
    T: float = 300.0
    V_DD: float = 1.0
    W_MTJ: float = 45e-9
    polarization: str = "easy"
    torque_scale: float = 1.0
    t_relax: float = 6e-9
    t_read: float = 1e-9
    I_read: float = 38e-6
    overhead_J: float = 0.01e-12

    def __post_init__(self):
        for name in ("fl_long_axis", "fl_short_axis", "t_FL", "t_HM", "t_MgO", "W_MTJ"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.fl_short_axis > self.fl_long_axis:
            raise ValueError("fl_short_axis must not exceed fl_long_axis")
        if not self.M_s > 0:
            raise ValueError("M_s must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.theta_SH <= 1:
            raise ValueError("theta_SH must lie in (0, 1]")
        if not 0 < self.R_P < self.R_AP:
            raise ValueError("require 0 < R_P < R_AP")
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if self.E_B_kT <= 0:
            raise ValueError("E_B must be positive")
        if self.polarization not in ("easy", "x", "y", "z"):
            raise ValueError(f"unknown polarization axis {self.polarization!r}")
        if not self.torque_scale > 0:
            raise ValueError("torque_scale must be positive")
        for name in ("t_PW", "t_relax", "t_read", "I_read", "overhead_J", "V_DD", "rho_HM"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def reference(cls):
        """Reference values with the verbatim (unit) torque prefactor."""
        return cls()

    @classmethod
    def calibrated(cls):
        """Reference values with the shipped torque-scale calibration."""
        return cls(torque_scale=CALIBRATED_TORQUE_SCALE)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def spin_hall_gain(self):
        return self.theta_SH * self.W_MTJ / self.t_HM

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        """Short SHA-256 digest of the canonical parameter set.

        Floats enter at 12 significant digits, the precision of the parameter
        file, so a saved and reloaded set keeps its digest.
        """
        canon = {k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in self.to_dict().items()}
        blob = json.dumps(canon, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def format_params(params: DeviceParams) -> str:
    lines = ["# SHE-MTJ device parameters (key = value unit)"]
    for field, (key, unit) in _FIELDS.items():
        value = getattr(params, field)
        if unit is None:
            lines.append(f"{key} = {value}")
            continue
        shown = f"{value / _UNITS[unit]:.12g}"
        lines.append(f"{key} = {shown} {unit}".rstrip())
    return "\n".join(lines) + "\n"


def parse_params(text: str, path=None) -> DeviceParams:
    key_to_field = {key: field for field, (key, _) in _FIELDS.items()}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamFileError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, rhs = (part.strip() for part in line.split("=", 1))
        if key not in key_to_field:
            raise ParamFileError(f"unknown parameter {key!r}", lineno, path)
        field = key_to_field[key]
        if field in values:
            raise ParamFileError(f"duplicate parameter {key!r}", lineno, path)
        display_unit = _FIELDS[field][1]
        if display_unit is None:
            values[field] = rhs
            continue
        parts = rhs.split()
        if len(parts) not in (1, 2):
            raise ParamFileError(f"cannot parse value {rhs!r}", lineno, path)
        try:
            number = float(parts[0])
        except ValueError:
            raise ParamFileError(f"not a number: {parts[0]!r}", lineno, path) from None
        unit = parts[1] if len(parts) == 2 else ""
        if unit not in _UNIT_KIND[display_unit]:
            if not (unit == "" and display_unit != ""):
                raise ParamFileError(f"unit {unit!r} not valid for {key}", lineno, path)
            # bare number: interpret in the display unit
            unit = display_unit
        if not math.isfinite(number):
            raise ParamFileError(f"non-finite value for {key}", lineno, path)
        values[field] = number * _UNITS[unit]
    try:
        return DeviceParams(**values)
    except ValueError as exc:
        raise ParamFileError(str(exc), None, path) from None


def resolve_params_path(name) -> Path:
    """Resolve a parameter file path, falling back to ``$SPINHALL_ISING_PARAMS_DIR``."""
    path = Path(name)
    if path.exists() or path.is_absolute():
        return path
    base = os.environ.get(PARAMS_DIR_ENV)
    if base:
        candidate = Path(base) / path
        if candidate.exists():
            return candidate
    return path


def load_params(path) -> DeviceParams:
    path = resolve_params_path(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParamFileError(f"cannot read parameter file: {exc.strerror}", None, path) from None
    return parse_params(text, path=path)


def save_params(params: DeviceParams, path):
    Path(path).write_text(format_params(params))
