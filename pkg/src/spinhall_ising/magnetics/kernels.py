"""numba kernels for the stochastic macrospin integrator.

Scalar-unrolled so a single trajectory runs without temporaries.  The model
constants travel in one float64 array laid out as ``PARAM_LAYOUT``.
"""

import math

import numpy as np

from .._accel import njit

PARAM_LAYOUT = ("ex", "ey", "ez", "H_k", "NMs_x", "NMs_y", "NMs_z", "c", "k", "alpha", "sigma", "dt")
N_PARAMS = len(PARAM_LAYOUT)


@njit(cache=True, inline="always", error_model="numpy")
def rhs(mx, my, mz, hx, hy, hz, ax, ay, az, c, k, alpha):
    """Explicit-form LLG right-hand side with the spin-torque term.

    ``c = gamma / (1 + alpha^2)``, ``k = 1 / (1 + alpha^2)``, ``a`` is the
    spin-torque rate vector ``I_s / (q N_s)`` in 1/s.
    """
    px = my * hz - mz * hy
    py = mz * hx - mx * hz
    pz = mx * hy - my * hx
    dx = my * pz - mz * py
    dy = mz * px - mx * pz
    dz = mx * py - my * px
    ma = mx * ax + my * ay + mz * az
    tx = ax - ma * mx
    ty = ay - ma * my
    tz = az - ma * mz
    ux = my * tz - mz * ty
    uy = mz * tx - mx * tz
    uz = mx * ty - my * tx
    return (
        -c * (px + alpha * dx) + k * (tx + alpha * ux),
        -c * (py + alpha * dy) + k * (ty + alpha * uy),
        -c * (pz + alpha * dz) + k * (tz + alpha * uz),
    )


@njit(cache=True, inline="always", error_model="numpy")
def field(mx, my, mz, ex, ey, ez, hk, nx, ny, nz, gx, gy, gz):
    along = hk * (mx * ex + my * ey + mz * ez)
    return (along * ex - nx * mx + gx, along * ey - ny * my + gy, along * ez - nz * mz + gz)


@njit(cache=True, inline="always", error_model="numpy")
def heun_step(mx, my, mz, gx, gy, gz, ax, ay, az, p):
    """One Heun step; the thermal sample ``g`` is shared by both stages."""
    ex, ey, ez, hk = p[0], p[1], p[2], p[3]
    nx, ny, nz = p[4], p[5], p[6]
    c, k, alpha, dt = p[7], p[8], p[9], p[11]
    hx, hy, hz = field(mx, my, mz, ex, ey, ez, hk, nx, ny, nz, gx, gy, gz)
    d1x, d1y, d1z = rhs(mx, my, mz, hx, hy, hz, ax, ay, az, c, k, alpha)
    rx = mx + dt * d1x
    ry = my + dt * d1y
    rz = mz + dt * d1z
    inv = 1.0 / math.sqrt(rx * rx + ry * ry + rz * rz)
    rx *= inv
    ry *= inv
    rz *= inv
    hx, hy, hz = field(rx, ry, rz, ex, ey, ez, hk, nx, ny, nz, gx, gy, gz)
    d2x, d2y, d2z = rhs(rx, ry, rz, hx, hy, hz, ax, ay, az, c, k, alpha)
    mx = mx + 0.5 * dt * (d1x + d2x)
    my = my + 0.5 * dt * (d1y + d2y)
    mz = mz + 0.5 * dt * (d1z + d2z)
    inv = 1.0 / math.sqrt(mx * mx + my * my + mz * mz)
    return mx * inv, my * inv, mz * inv


@njit(cache=True, inline="always", error_model="numpy")
def reduced_energy(mx, my, mz, p):
    """Energy density divided by ``mu0 M_s`` (A/m)."""
    along = mx * p[0] + my * p[1] + mz * p[2]
    return -0.5 * p[3] * along * along + 0.5 * (p[4] * mx * mx + p[5] * my * my + p[6] * mz * mz)


@njit(cache=True, nogil=True, error_model="numpy")
def run_segment(gen, m, n_steps, a, p, settle_level, record_every, out, track_norm=False):
    """Advance ``m`` in place by up to ``n_steps`` Heun steps at constant torque ``a``.

    Stops early once the reduced energy drops below ``settle_level`` (pass
    ``-inf`` to disable).  When ``record_every > 0`` every ``record_every``-th
    state is written to ``out``.  ``track_norm`` records the largest
    ``| |m| - 1 |`` seen after any step.

    Returns ``(steps_done, finite, max_norm_error)``.
    """
    mx, my, mz = m[0], m[1], m[2]
    ax, ay, az = a[0], a[1], a[2]
    sigma = p[10]
    noisy = sigma > 0.0
    settle = settle_level > -math.inf
    gx = gy = gz = 0.0
    worst = 0.0
    steps = 0
    finite = True
    for _ in range(n_steps):
        if settle and reduced_energy(mx, my, mz, p) < settle_level:
            break
        if noisy:
            gx = sigma * gen.standard_normal()
            gy = sigma * gen.standard_normal()
            gz = sigma * gen.standard_normal()
        mx, my, mz = heun_step(mx, my, mz, gx, gy, gz, ax, ay, az, p)
        steps += 1
        # inf/inf after normalization shows up as NaN
        if mx != mx or my != my or mz != mz:
            finite = False
            break
        if track_norm:
            err = abs(math.sqrt(mx * mx + my * my + mz * mz) - 1.0)
            if err > worst:
                worst = err
        if record_every > 0 and steps % record_every == 0:
            row = steps // record_every - 1
            out[row, 0] = mx
            out[row, 1] = my
            out[row, 2] = mz
    m[0] = mx
    m[1] = my
    m[2] = mz
    return steps, finite, worst


@njit(cache=True, nogil=True, error_model="numpy")
def write_trial(gen, m, n_burn, n_write, n_relax, a_write, p, settle_level):
    """Burn-in at zero current, write pulse, relax.  Returns ``(steps, finite)``."""
    zero = np.zeros(3)
    empty = np.empty((0, 3))
    total = 0
    s, ok, _ = run_segment(gen, m, n_burn, zero, p, -math.inf, 0, empty)
    total += s
    if not ok:
        return total, False
    s, ok, _ = run_segment(gen, m, n_write, a_write, p, -math.inf, 0, empty)
    total += s
    if not ok:
        return total, False
    s, ok, _ = run_segment(gen, m, n_relax, zero, p, settle_level, 0, empty)
    total += s
    return total, ok
