"""Physical constants (SI, CODATA values as shipped with scipy)."""

from dataclasses import dataclass

import scipy.constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    mu_B: float = _sc.physical_constants["Bohr magneton"][0]  # J/T
    mu_0: float = _sc.mu_0  # T m / A
    hbar: float = _sc.hbar  # J s
    q: float = _sc.e  # C
    k_B: float = _sc.k  # J / K

    @property
    def gamma(self):
        """Electron gyromagnetic ratio 2 mu_B mu_0 / hbar, in m/(A s)."""
        return 2.0 * self.mu_B * self.mu_0 / self.hbar


CONSTANTS = PhysicalConstants()
