"""Pure-numpy integrator, vectorized across independent trajectories.

Mirrors :mod:`spinhall_ising.magnetics.kernels` operation for operation and
consumes each trajectory's generator in the same order (three normals per
step), so both engines agree to rounding.
"""

import numpy as np

_CHUNK = 2048


def _cross(a, b):
    return np.stack(
        (
            a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
            a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
            a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
        ),
        axis=1,
    )


def rhs(m, h, a, c, k, alpha):
    p = _cross(m, h)
    d = _cross(m, p)
    if a.ndim == 2:
        ma = m[:, 0] * a[:, 0] + m[:, 1] * a[:, 1] + m[:, 2] * a[:, 2]
    else:
        ma = _dot3(m, a)
    ma = ma[:, None]
    t = a - ma * m
    u = _cross(m, t)
    return -c * (p + alpha * d) + k * (t + alpha * u)


def _dot3(m, v):
    return m[:, 0] * v[0] + m[:, 1] * v[1] + m[:, 2] * v[2]


def field(m, p, g):
    e = p[0:3]
    nd = p[4:7]
    along = p[3] * _dot3(m, e)
    return along[:, None] * e - nd * m + g


def heun_step(m, g, a, p):
    c, k, alpha, dt = p[7], p[8], p[9], p[11]
    d1 = rhs(m, field(m, p, g), a, c, k, alpha)
    r = m + dt * d1
    r = r * (1.0 / np.sqrt(r[:, 0] * r[:, 0] + r[:, 1] * r[:, 1] + r[:, 2] * r[:, 2]))[:, None]
    d2 = rhs(r, field(r, p, g), a, c, k, alpha)
    m = m + 0.5 * dt * (d1 + d2)
    return m * (1.0 / np.sqrt(m[:, 0] * m[:, 0] + m[:, 1] * m[:, 1] + m[:, 2] * m[:, 2]))[:, None]


def reduced_energy(m, p):
    along = _dot3(m, p[0:3])
    return -0.5 * p[3] * along * along + 0.5 * (
        p[4] * m[:, 0] * m[:, 0] + p[5] * m[:, 1] * m[:, 1] + p[6] * m[:, 2] * m[:, 2]
    )


def run_segment(gens, m, n_steps, a, p, settle_level=-np.inf, record_every=0, out=None):
    """Advance a batch ``m`` (shape (n, 3)) in place.

    ``gens`` holds one generator per row.  Rows stop individually once their
    reduced energy falls below ``settle_level``.  ``out`` (shape
    (n, n_rec, 3)) receives every ``record_every``-th state.

    Returns ``(steps_done, finite, max_norm_error)`` arrays of length n.
    """
    n = m.shape[0]
    a = np.asarray(a, dtype=float)
    sigma = p[10]
    active = np.ones(n, dtype=bool)
    finite = np.ones(n, dtype=bool)
    steps = np.zeros(n, dtype=np.int64)
    worst = np.zeros(n)
    settle = settle_level > -np.inf
    done = 0
    while done < n_steps and active.any():
        chunk = min(_CHUNK, n_steps - done)
        if sigma > 0.0:
            noise = np.stack([g.standard_normal((chunk, 3)) for g in gens]) * sigma
        else:
            noise = np.zeros((n, chunk, 3))
        for j in range(chunk):
            if settle:
                active &= ~(reduced_energy(m, p) < settle_level)
            if not active.any():
                break
            idx = np.flatnonzero(active)
            aa = a[idx] if a.ndim == 2 else a
            new = heun_step(m[idx], noise[idx, j], aa, p)
            err = np.abs(np.sqrt(np.sum(new * new, axis=1)) - 1.0)
            bad = ~np.isfinite(err)
            m[idx] = new
            steps[idx] += 1
            worst[idx] = np.maximum(worst[idx], np.where(bad, 0.0, err))
            if bad.any():
                finite[idx[bad]] = False
                active[idx[bad]] = False
            if record_every > 0:
                rec = idx[(steps[idx] % record_every) == 0]
                if rec.size:
                    rows = steps[rec] // record_every - 1
                    out[rec, rows] = m[rec]
        done += chunk
    return steps, finite, worst


def write_trials(gens, m, n_burn, n_write, n_relax, a_write, p, settle_level):
    """Batch counterpart of the numba ``write_trial``.  Returns ``(steps, finite)``."""
    zero = np.zeros(3)
    total = np.zeros(m.shape[0], dtype=np.int64)
    s, ok1, _ = run_segment(gens, m, n_burn, zero, p)
    total += s
    s, ok2, _ = run_segment(gens, m, n_write, a_write, p)
    total += s
    s, ok3, _ = run_segment(gens, m, n_relax, zero, p, settle_level)
    total += s
    return total, ok1 & ok2 & ok3
