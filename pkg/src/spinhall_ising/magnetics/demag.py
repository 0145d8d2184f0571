"""Demagnetization factors of a thin elliptical free layer.

Frame: x along the long in-plane axis, y along the short in-plane axis,
z along the film normal.  ``long_axis`` and ``short_axis`` are full axis
lengths (not semi-axes).
"""

import numpy as np
from scipy import integrate

# ln 8 - 1/2: constant of the thin-film expansion (equals the thin-disk value)
_THIN_FILM_CONST = np.log(8.0) - 0.5


def thin_film_ellipse_factors(long_axis, short_axis, thickness, n_angles=256):
    """Log-corrected thin-film demag factors ``(N_x, N_y, N_z)``.

    For a uniformly magnetized elliptic cylinder with semi-axes ``a >= b`` and
    thickness ``t << b`` the in-plane factors are, to first order in ``t``,

        N_x = t / (2 pi^2) * \\oint cos^2(phi) / (a^2 g) [ln(8 / (g t)) - 1/2] dphi
        N_y = t / (2 pi^2) * \\oint sin^2(phi) / (b^2 g) [ln(8 / (g t)) - 1/2] dphi

    with ``g(phi) = sqrt(cos^2 phi / a^2 + sin^2 phi / b^2)``, and
    ``N_z = 1 - N_x - N_y``.  For a circle this reduces to the classic thin-disk
    result ``N_x = N_y = t / (2 pi R) (ln(8R/t) - 1/2)``.  The periodic angular
    integral is evaluated with the trapezoid rule, which converges
    geometrically for this smooth integrand.
    """
    a = 0.5 * long_axis
    b = 0.5 * short_axis
    t = float(thickness)
    if not (a > 0 and b > 0 and t > 0):
        raise ValueError("dimensions must be positive")
    phi = (np.arange(n_angles) + 0.5) * (2.0 * np.pi / n_angles)
    c2 = np.cos(phi) ** 2
    s2 = np.sin(phi) ** 2
    g = np.sqrt(c2 / a**2 + s2 / b**2)
    log_term = np.log(8.0 / (g * t)) - 0.5
    weight = t / (2.0 * np.pi**2) * (2.0 * np.pi / n_angles)
    nx = weight * np.sum(c2 / (a**2 * g) * log_term)
    ny = weight * np.sum(s2 / (b**2 * g) * log_term)
    return np.array([nx, ny, 1.0 - nx - ny])


def _slab_kernel(d, t):
    # \int_0^t \int_0^t dz dz' / sqrt(d^2 + (z - z')^2)
    return 2.0 * (t * np.arcsinh(t / d) - np.hypot(t, d) + d)


def surface_integral_factors(long_axis, short_axis, thickness, n_outer=96, rtol=1e-9):
    """Demag factors from the magnetostatic self-energy of surface charges.

    For magnetization along an in-plane axis the charges sit on the lateral
    surface with density ``M n_i``; the factor is

        N_i = 1 / (4 pi V) \\iint n_i n_i' / |r - r'| dS dS'.

    The two height integrals are done in closed form, the remaining double
    angular integral numerically (log-singular inner integral by adaptive
    quadrature, smooth periodic outer integral by the midpoint rule).
    ``N_z`` follows from the trace identity.  Slow; meant as a reference.
    """
    a = 0.5 * long_axis
    b = 0.5 * short_axis
    t = float(thickness)
    volume = np.pi * a * b * t
    splits = [(-np.pi, -0.1), (-0.1, 0.0), (0.0, 0.1), (0.1, np.pi)]

    def factor(component):
        def inner(p1):
            c1, s1 = np.cos(p1), np.sin(p1)

            def f(psi):
                p2 = p1 + psi
                c2, s2 = np.cos(p2), np.sin(p2)
                d = np.hypot(a * (c1 - c2), b * (s1 - s2))
                # outward normal times arc length: (b cos, a sin) dphi
                w = b * b * c1 * c2 if component == 0 else a * a * s1 * s2
                return w * _slab_kernel(d, t)

            return sum(
                integrate.quad(f, lo, hi, limit=400, epsabs=0.0, epsrel=rtol)[0]
                for lo, hi in splits
            )

        phis = (np.arange(n_outer) + 0.5) * (2.0 * np.pi / n_outer)
        total = sum(inner(p) for p in phis) * (2.0 * np.pi / n_outer)
        return total / (4.0 * np.pi * volume)

    nx = factor(0)
    ny = factor(1)
    return np.array([nx, ny, 1.0 - nx - ny])
