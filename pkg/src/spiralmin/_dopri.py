"""Dormand-Prince 5(4) integrator for the profile system.

State ``y = (s, s', s1, s2)`` in arc length. The right-hand side is written
out for this system only so the whole stepping loop compiles under numba.
Accepted steps are forced to land on every multiple of ``knot_dt`` so the
stored knots are true step endpoints rather than dense-output values.
"""

import math

import numpy as np

from ._accel import jit

# fmt: off
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0,
                          22.0 / 525.0, -1.0 / 40.0)
# fmt: on

DONE, CHANGES_REACHED, BUFFER_FULL, STEP_UNDERFLOW = 0, 1, 2, 3


@jit
def profile_rhs(y, k1, k2, c1, c2, out):
    s = y[0]
    c = math.cos(s)
    sn = math.sin(s)
    u = c1 * c1 - 1.0
    numer = 1.0 + u * c * c
    ratio = numer / (c ** (2.0 * k1 + 2.0) * sn ** (2.0 * k2 + 2.0))
    dlog = -2.0 * u * c * sn / numer + (2.0 * k1 + 2.0) * sn / c - (2.0 * k2 + 2.0) * c / sn
    rc2 = math.sqrt(c2)
    out[0] = y[1]
    out[1] = -ratio * dlog / (2.0 * c2)
    out[2] = 1.0 / (rc2 * c ** (k1 + 2.0) * sn**k2)
    out[3] = c1 / (rc2 * c**k1 * sn ** (k2 + 2.0))


@jit
def _err_norm(y, ynew, err, rtol, atol):
    acc = 0.0
    for i in range(y.shape[0]):
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        acc += (err[i] / sc) ** 2
    return math.sqrt(acc / y.shape[0])


@jit
def dopri_run(y0, t0, t_stop, h0, rtol, atol, knot_dt, knot_origin, max_changes,
              k1, k2, c1, c2, T, Y, changes0):
    """Integrate from ``(t0, y0)``; fills ``T[0:n]`` and ``Y[0:n]``.

    Returns ``(n, status, h_next, changes)`` where ``changes`` counts sign
    changes of ``s'`` (turning points) including ``changes0`` carried over
    from a previous call.
    """
    n_max = T.shape[0]
    dim = y0.shape[0]
    k1v = np.empty(dim)
    k2v = np.empty(dim)
    k3v = np.empty(dim)
    k4v = np.empty(dim)
    k5v = np.empty(dim)
    k6v = np.empty(dim)
    k7v = np.empty(dim)
    tmp = np.empty(dim)
    ynew = np.empty(dim)
    err = np.empty(dim)
    y = y0.copy()
    t = t0
    h = h0
    changes = changes0
    T[0] = t
    for i in range(dim):
        Y[0, i] = y[i]
    n = 1
    profile_rhs(y, k1, k2, c1, c2, k1v)
    while True:
        if t >= t_stop:
            return n, DONE, h, changes
        if n >= n_max:
            return n, BUFFER_FULL, h, changes
        m = math.floor((t - knot_origin) / knot_dt + 1e-7) + 1.0
        next_knot = knot_origin + m * knot_dt
        if next_knot > t_stop:
            next_knot = t_stop
        h_try = h
        landing = False
        if t + h_try >= next_knot - 1e-12 * knot_dt:
            h_try = next_knot - t
            landing = True
        if h_try < 1e-14 * max(1.0, abs(t)):
            return n, STEP_UNDERFLOW, h, changes

        for i in range(dim):
            tmp[i] = y[i] + h_try * A21 * k1v[i]
        profile_rhs(tmp, k1, k2, c1, c2, k2v)
        for i in range(dim):
            tmp[i] = y[i] + h_try * (A31 * k1v[i] + A32 * k2v[i])
        profile_rhs(tmp, k1, k2, c1, c2, k3v)
        for i in range(dim):
            tmp[i] = y[i] + h_try * (A41 * k1v[i] + A42 * k2v[i] + A43 * k3v[i])
        profile_rhs(tmp, k1, k2, c1, c2, k4v)
        for i in range(dim):
            tmp[i] = y[i] + h_try * (A51 * k1v[i] + A52 * k2v[i] + A53 * k3v[i] + A54 * k4v[i])
        profile_rhs(tmp, k1, k2, c1, c2, k5v)
        for i in range(dim):
            tmp[i] = y[i] + h_try * (A61 * k1v[i] + A62 * k2v[i] + A63 * k3v[i] + A64 * k4v[i]
                                     + A65 * k5v[i])
        profile_rhs(tmp, k1, k2, c1, c2, k6v)
        for i in range(dim):
            ynew[i] = y[i] + h_try * (B1 * k1v[i] + B3 * k3v[i] + B4 * k4v[i] + B5 * k5v[i]
                                      + B6 * k6v[i])
        profile_rhs(ynew, k1, k2, c1, c2, k7v)
        for i in range(dim):
            err[i] = h_try * (E1 * k1v[i] + E3 * k3v[i] + E4 * k4v[i] + E5 * k5v[i]
                              + E6 * k6v[i] + E7 * k7v[i])
        en = _err_norm(y, ynew, err, rtol, atol)

        if en <= 1.0:
            vold = y[1]
            t = next_knot if landing else t + h_try
            for i in range(dim):
                y[i] = ynew[i]
                k1v[i] = k7v[i]
            T[n] = t
            for i in range(dim):
                Y[n, i] = y[i]
            n += 1
            if (vold * y[1] < 0.0) or (y[1] == 0.0 and vold != 0.0):
                changes += 1
                if changes >= max_changes:
                    return n, CHANGES_REACHED, h, changes
            fac = 5.0 if en == 0.0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
            if not landing:
                h = h_try * fac
            else:
                h = max(h, h_try * fac)
        else:
            h = h_try * max(0.2, 0.9 * en ** -0.2)
