"""Inner loops shared by the geometry kernel and the profile interpolant.

Every kernel exists twice: a vectorized numpy version and a loop version that
is compiled by numba when acceleration is enabled. ``laplacian_reduce`` and
``hermite_eval`` dispatch on :data:`spiralmin._accel.NUMBA_ENABLED`; the
individual implementations stay importable for the benchmark and the
backend-agreement tests.
"""

import numpy as np

from ._accel import NUMBA_ENABLED, jit

# Central-difference stencils. The nonzero offsets of the second-derivative
# stencil coincide with the first-derivative offsets for both orders, so one
# set of axis samples serves the Jacobian and the Hessian diagonal.
OFFSETS = {
    2: np.array([-1.0, 1.0]),
    4: np.array([-2.0, -1.0, 1.0, 2.0]),
}
D1_WEIGHTS = {
    2: np.array([-0.5, 0.5]),
    4: np.array([1.0, -8.0, 8.0, -1.0]) / 12.0,
}
D2_WEIGHTS = {
    2: np.array([1.0, 1.0]),
    4: np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0,
}
D2_CENTER = {2: -2.0, 4: -30.0 / 12.0}


def stencil_offsets(k, order, step, outer_step=None):
    """Chart offsets of the full stencil, shape ``(S, k)``.

    Layout (``Q = len(OFFSETS[order])``):

    * ``[0]`` the center point;
    * ``k*Q`` axis points ``step*q*e_i``;
    * ``Q*Q`` mixed points per pair ``i < j``;
    * when ``outer_step`` is given, ``k*Q*k*Q`` points ``outer_step*r*e_i +
      step*q*e_j`` holding the Jacobian stencils around each outer node.
    """
    q = OFFSETS[order]
    nq = len(q)
    eye = np.eye(k)
    blocks = [np.zeros((1, k))]
    blocks.append((q[None, :, None] * eye[:, None, :]).reshape(k * nq, k) * step)
    mixed = []
    for i in range(k):
        for j in range(i + 1, k):
            mixed.append(
                step * (q[:, None, None] * eye[i] + q[None, :, None] * eye[j]).reshape(nq * nq, k)
            )
    if mixed:
        blocks.append(np.concatenate(mixed))
    if outer_step is not None:
        outer = (
            outer_step * q[None, :, None, None, None] * eye[:, None, None, None, :]
            + step * q[None, None, None, :, None] * eye[None, None, :, None, :]
        )
        blocks.append(outer.reshape(k * nq * k * nq, k))
    return np.concatenate(blocks)


def _layout(k, nq):
    n_axis = k * nq
    n_mixed = (k * (k - 1) // 2) * nq * nq
    return 1, 1 + n_axis, 1 + n_axis + n_mixed


# ---------------------------------------------------------------------------
# Laplace-Beltrami reduction


def laplacian_reduce_numpy(F, k, order, step, outer_step):
    """Coordinate Laplacian from stencil samples ``F`` of shape ``(P, S, D)``.

    Returns ``(lap, det_min)`` where ``det_min`` is the smallest metric
    determinant met at the center or any outer node of each point.
    """
    P, _, D = F.shape
    w1, w2, c2 = D1_WEIGHTS[order], D2_WEIGHTS[order], D2_CENTER[order]
    nq = len(w1)
    a0, m0, o0 = _layout(k, nq)
    h2 = step * step

    f0 = F[:, 0]
    ax = F[:, a0:m0].reshape(P, k, nq, D)
    jac = np.einsum("pkqd,q->pkd", ax, w1) / step
    hess = np.empty((P, k, k, D))
    idx = np.arange(k)
    hess[:, idx, idx] = (np.einsum("pkqd,q->pkd", ax, w2) + c2 * f0[:, None]) / h2
    if k > 1:
        mixed = F[:, m0:o0].reshape(P, -1, nq, nq, D)
        hm = np.einsum("pnabd,a,b->pnd", mixed, w1, w1) / h2
        n = 0
        for i in range(k):
            for j in range(i + 1, k):
                hess[:, i, j] = hm[:, n]
                hess[:, j, i] = hm[:, n]
                n += 1

    g = np.einsum("pid,pjd->pij", jac, jac)
    det = np.linalg.det(g)
    ginv = np.linalg.inv(g)
    term = np.einsum("pij,pijd->pd", ginv, hess)

    outer = F[:, o0:].reshape(P, k, nq, k, nq, D)
    jq = np.einsum("pirjqd,q->pirjd", outer, w1) / step
    gq = np.einsum("pirjd,pirld->pirjl", jq, jq)
    detq = np.linalg.det(gq)
    # row i of sqrt(g) g^{-1} at the nodes displaced along e_i
    wrow = np.einsum("pirij->pirj", np.linalg.inv(gq)) * np.sqrt(np.abs(detq))[..., None]
    div = np.einsum("pirj,r->pj", wrow, w1) / outer_step
    term += np.einsum("pj,pjd->pd", div, jac) / np.sqrt(np.abs(det))[:, None]

    det_min = np.minimum(det, detq.reshape(P, -1).min(axis=1))
    return term, det_min


@jit
def _inv_det(g, out):
    # Gauss-Jordan with partial pivoting on a small SPD matrix; returns det
    n = g.shape[0]
    a = g.copy()
    for i in range(n):
        for j in range(n):
            out[i, j] = 1.0 if i == j else 0.0
    det = 1.0
    for c in range(n):
        piv = c
        best = abs(a[c, c])
        for r in range(c + 1, n):
            if abs(a[r, c]) > best:
                best = abs(a[r, c])
                piv = r
        if best == 0.0:
            return 0.0
        if piv != c:
            det = -det
            for j in range(n):
                a[c, j], a[piv, j] = a[piv, j], a[c, j]
                out[c, j], out[piv, j] = out[piv, j], out[c, j]
        d = a[c, c]
        det *= d
        for j in range(n):
            a[c, j] /= d
            out[c, j] /= d
        for r in range(n):
            if r != c:
                m = a[r, c]
                if m != 0.0:
                    for j in range(n):
                        a[r, j] -= m * a[c, j]
                        out[r, j] -= m * out[c, j]
    return det


@jit
def laplacian_reduce_loop(F, k, w1, w2, c2, step, outer_step):
    P, S, D = F.shape
    nq = w1.shape[0]
    a0 = 1
    m0 = 1 + k * nq
    o0 = m0 + (k * (k - 1) // 2) * nq * nq
    h2 = step * step
    lap = np.zeros((P, D))
    det_min = np.empty(P)
    jac = np.empty((k, D))
    hess = np.empty((k, k, D))
    g = np.empty((k, k))
    ginv = np.empty((k, k))
    jq = np.empty((k, D))
    gq = np.empty((k, k))
    gqinv = np.empty((k, k))
    div = np.empty(k)
    for p in range(P):
        for i in range(k):
            for d in range(D):
                s1 = 0.0
                s2 = c2 * F[p, 0, d]
                for q in range(nq):
                    v = F[p, a0 + i * nq + q, d]
                    s1 += w1[q] * v
                    s2 += w2[q] * v
                jac[i, d] = s1 / step
                hess[i, i, d] = s2 / h2
        n = 0
        for i in range(k):
            for j in range(i + 1, k):
                base = m0 + n * nq * nq
                for d in range(D):
                    acc = 0.0
                    for qa in range(nq):
                        for qb in range(nq):
                            acc += w1[qa] * w1[qb] * F[p, base + qa * nq + qb, d]
                    hess[i, j, d] = acc / h2
                    hess[j, i, d] = acc / h2
                n += 1
        for i in range(k):
            for j in range(k):
                acc = 0.0
                for d in range(D):
                    acc += jac[i, d] * jac[j, d]
                g[i, j] = acc
        det = _inv_det(g, ginv)
        dmin = det
        for d in range(D):
            acc = 0.0
            for i in range(k):
                for j in range(k):
                    acc += ginv[i, j] * hess[i, j, d]
            lap[p, d] = acc
        for j in range(k):
            div[j] = 0.0
        for i in range(k):
            for r in range(nq):
                for jj in range(k):
                    base = o0 + ((i * nq + r) * k + jj) * nq
                    for d in range(D):
                        acc = 0.0
                        for q in range(nq):
                            acc += w1[q] * F[p, base + q, d]
                        jq[jj, d] = acc / step
                for a in range(k):
                    for b in range(k):
                        acc = 0.0
                        for d in range(D):
                            acc += jq[a, d] * jq[b, d]
                        gq[a, b] = acc
                detq = _inv_det(gq, gqinv)
                if detq < dmin:
                    dmin = detq
                sq = np.sqrt(abs(detq))
                for j in range(k):
                    div[j] += w1[r] * sq * gqinv[i, j] / outer_step
        sg = np.sqrt(abs(det))
        for d in range(D):
            acc = 0.0
            for j in range(k):
                acc += div[j] * jac[j, d]
            lap[p, d] += acc / sg
        det_min[p] = dmin
    return lap, det_min


def laplacian_reduce(F, k, order, step, outer_step):
    if NUMBA_ENABLED:
        return laplacian_reduce_loop(
            np.ascontiguousarray(F, dtype=np.float64), k,
            D1_WEIGHTS[order], D2_WEIGHTS[order], D2_CENTER[order], step, outer_step,
        )
    return laplacian_reduce_numpy(F, k, order, step, outer_step)


# ---------------------------------------------------------------------------
# Quintic Hermite interpolation


def hermite_coefficients(t, y, dy, d2y):
    """Per-interval power coefficients in the local variable ``u = (t - t_i)/h_i``.

    Returns an array of shape ``(n - 1, 6)``; the interpolant matches value,
    first and second derivative at every knot, so it is C^2 globally.
    """
    h = np.diff(t)
    c0 = y[:-1]
    c1 = h * dy[:-1]
    c2 = 0.5 * h * h * d2y[:-1]
    r0 = y[1:] - (c0 + c1 + c2)
    r1 = h * dy[1:] - (c1 + 2.0 * c2)
    r2 = h * h * d2y[1:] - 2.0 * c2
    c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2
    c4 = -15.0 * r0 + 7.0 * r1 - r2
    c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2
    return np.stack([c0, c1, c2, c3, c4, c5], axis=-1)


def hermite_eval_numpy(knots, coef, t):
    """Value, first and second derivative of the piecewise quintic at ``t``.

    ``coef`` has shape ``(n - 1, 6)`` or ``(n - 1, m, 6)`` for ``m`` stacked
    curves sharing the knots; outputs then carry a trailing ``m`` axis.
    """
    i = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, len(knots) - 2)
    h = knots[i + 1] - knots[i]
    u = (t - knots[i]) / h
    c = coef[i]
    if c.ndim == 3:
        u = u[:, None]
        h = h[:, None]
    c0, c1, c2, c3, c4, c5 = (c[..., j] for j in range(6))
    val = c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))))
    d1 = c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)))
    d2 = 2.0 * c2 + u * (6.0 * c3 + u * (12.0 * c4 + u * 20.0 * c5))
    return val, d1 / h, d2 / (h * h)


@jit
def hermite_eval_loop(knots, coef, t):
    n = knots.shape[0]
    m = coef.shape[1]
    P = t.shape[0]
    val = np.empty((P, m))
    d1 = np.empty((P, m))
    d2 = np.empty((P, m))
    for p in range(P):
        x = t[p]
        lo = 0
        hi = n - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if knots[mid] <= x:
                lo = mid
            else:
                hi = mid
        h = knots[lo + 1] - knots[lo]
        u = (x - knots[lo]) / h
        for j in range(m):
            c0 = coef[lo, j, 0]
            c1 = coef[lo, j, 1]
            c2 = coef[lo, j, 2]
            c3 = coef[lo, j, 3]
            c4 = coef[lo, j, 4]
            c5 = coef[lo, j, 5]
            val[p, j] = c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))))
            d1[p, j] = (c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)))) / h
            d2[p, j] = (2.0 * c2 + u * (6.0 * c3 + u * (12.0 * c4 + u * 20.0 * c5))) / (h * h)
    return val, d1, d2


def hermite_eval(knots, coef, t):
    """Dispatching front end; ``coef`` must be ``(n - 1, m, 6)``."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    if NUMBA_ENABLED:
        return hermite_eval_loop(knots, coef, t)
    return hermite_eval_numpy(knots, coef, t)
