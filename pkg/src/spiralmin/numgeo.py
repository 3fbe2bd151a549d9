"""Chart-based numerical differential geometry.

Maps are vectorized: they take chart points of shape ``(P, k)`` and return
ambient values of shape ``(P, D)``. A point of C^{n+1} is stored as ``2(n+1)``
interleaved reals ``(Re z0, Im z0, Re z1, Im z1, ...)``, and the complex
structure acts on each pair as ``(x, y) -> (-y, x)``.

Anything exposing ``evaluate``, ``chart_lo`` and ``chart_hi`` (such as
:class:`~spiralmin.catalog.ImmersionSpec`) can be passed where a map is
expected; a bare callable is treated as defined on all of R^k.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateMetric, NonFiniteValue, StencilOutOfChart

DEFAULT_STEP = 1e-3
DEFAULT_OUTER_STEP = 3e-3
DET_FLOOR = 1e-14


@dataclass(frozen=True)
class ChartMap:
    """A bare map together with the open box it is defined on."""

    evaluate: object
    chart_lo: np.ndarray
    chart_hi: np.ndarray

    def __call__(self, points):
        return self.evaluate(points)


@dataclass(frozen=True)
class JetSample:
    value: np.ndarray  # (D,)
    jacobian: np.ndarray  # (k, D), row i is the derivative along x_i
    hessian: np.ndarray  # (k, k, D)
    step: float
    order: int


@dataclass(frozen=True)
class MetricSample:
    entries: np.ndarray
    det: float
    inverse: np.ndarray


def _resolve(fmap):
    if hasattr(fmap, "evaluate"):
        lo = getattr(fmap, "chart_lo", None)
        hi = getattr(fmap, "chart_hi", None)
        return fmap.evaluate, lo, hi
    return fmap, None, None


def _check_box(points, reach, lo, hi):
    if lo is None:
        return
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(points - reach <= lo) or np.any(points + reach >= hi):
        bad = np.flatnonzero(np.any((points - reach <= lo) | (points + reach >= hi), axis=-1))
        raise StencilOutOfChart(
            f"stencil of reach {reach:g} leaves the chart box at point {points[bad[0]].tolist()}"
        )


def _sample(evaluate, points, offsets):
    pts = points[:, None, :] + offsets[None, :, :]
    P, S, k = pts.shape
    vals = np.asarray(evaluate(pts.reshape(P * S, k)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("map returned non-finite values on the stencil")
    return vals.reshape(P, S, -1)


def _as_points(p):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return p[None, :] if p.ndim == 1 else p


def complex_structure(v):
    """Multiplication by i on interleaved vectors (last axis)."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0::2] = -v[..., 1::2]
    out[..., 1::2] = v[..., 0::2]
    return out


def jets(fmap, points, step=DEFAULT_STEP, order=2):
    """Batched value, Jacobian and Hessian at ``points`` of shape ``(P, k)``."""
    if step <= 0:
        raise ValueError("step must be positive")
    if order not in _kernels.OFFSETS:
        raise ValueError("order must be 2 or 4")
    evaluate, lo, hi = _resolve(fmap)
    points = _as_points(points)
    P, k = points.shape
    q = _kernels.OFFSETS[order]
    _check_box(points, np.abs(q).max() * step, lo, hi)
    F = _sample(evaluate, points, _kernels.stencil_offsets(k, order, step))
    nq = len(q)
    w1, w2, c2 = _kernels.D1_WEIGHTS[order], _kernels.D2_WEIGHTS[order], _kernels.D2_CENTER[order]
    f0 = F[:, 0]
    ax = F[:, 1:1 + k * nq].reshape(P, k, nq, -1)
    jac = np.einsum("pkqd,q->pkd", ax, w1) / step
    hess = np.empty((P, k, k, F.shape[-1]))
    idx = np.arange(k)
    hess[:, idx, idx] = (np.einsum("pkqd,q->pkd", ax, w2) + c2 * f0[:, None]) / step**2
    n = 0
    base = 1 + k * nq
    for i in range(k):
        for j in range(i + 1, k):
            block = F[:, base + n * nq * nq: base + (n + 1) * nq * nq].reshape(P, nq, nq, -1)
            hij = np.einsum("pabd,a,b->pd", block, w1, w1) / step**2
            hess[:, i, j] = hij
            hess[:, j, i] = hij
            n += 1
    return f0, jac, hess


def fd_jet(fmap, p, step=DEFAULT_STEP, order=2):
    """Central-difference jet of ``fmap`` at the chart point ``p``.

    Truncation error is O(step**order) per component. Mixed partials are
    computed once and mirrored, so the Hessian is exactly symmetric.
    """
    f0, jac, hess = jets(fmap, p, step, order)
    return JetSample(value=f0[0], jacobian=jac[0], hessian=hess[0], step=float(step), order=order)


def _metric_from_jacobian(jac):
    return metric_sample(jac @ jac.T)


def metric_sample(g):
    """Wrap a symmetric matrix as a :class:`MetricSample`, rejecting degenerate ones."""
    g = np.asarray(g, dtype=float)
    g = 0.5 * (g + g.T)
    det = float(np.linalg.det(g))
    if not det > DET_FLOOR:
        raise DegenerateMetric(f"metric determinant {det:.3e} is not above {DET_FLOOR:g}")
    inv = np.linalg.inv(g)
    return MetricSample(entries=g, det=det, inverse=0.5 * (inv + inv.T))


def pullback_metric(fmap, p, step=DEFAULT_STEP, order=4):
    """Induced metric ``g_ij = <d_i f, d_j f>`` at ``p``.

    Uses fourth-order Jacobians by default so that flat test metrics are
    reproduced to about 1e-12.
    """
    _, jac, _ = jets(fmap, p, step, order)
    return _metric_from_jacobian(jac[0])


def pullback_metrics(fmap, points, step=DEFAULT_STEP, order=4):
    """Batched induced metrics, shape ``(P, k, k)``."""
    _, jac, _ = jets(fmap, points, step, order)
    g = np.einsum("pid,pjd->pij", jac, jac)
    return 0.5 * (g + np.swapaxes(g, 1, 2))


def _laplacian(fmap, points, step, outer_step, order):
    evaluate, lo, hi = _resolve(fmap)
    P, k = points.shape
    reach = np.abs(_kernels.OFFSETS[order]).max() * (step + outer_step)
    _check_box(points, reach, lo, hi)
    F = _sample(evaluate, points, _kernels.stencil_offsets(k, order, step, outer_step))
    lap, det_min = _kernels.laplacian_reduce(F, k, order, step, outer_step)
    bad = det_min <= DET_FLOOR
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DegenerateMetric(
            f"metric determinant {det_min[i]:.3e} near point {points[i].tolist()} is not above {DET_FLOOR:g}"
        )
    return lap, F[:, 0]


def laplace_beltrami_batch(fmap, points, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP,
                           order=2, refine=False):
    """Coordinate Laplacian of ``fmap`` at every row of ``points``.

    Evaluates ``(1/sqrt g) d_i(sqrt g g^ij d_j f)`` in product-rule form: the
    Hessian of ``f`` is contracted with ``g^ij`` and the divergence of
    ``sqrt g g^ij`` is taken by a central difference of width ``outer_step``
    over metrics that are themselves finite-difference Jacobians of width
    ``step``.

    Returns
    -------
    lap : ndarray (P, D)
    values : ndarray (P, D)
        ``fmap`` at the points.
    error : ndarray (P,) or None
        With ``refine``, one Richardson step over ``(step, step/2)`` is
        applied and ``error`` holds the max-norm of the correction.
    """
    if step <= 0 or outer_step <= 0:
        raise ValueError("steps must be positive")
    if order not in _kernels.OFFSETS:
        raise ValueError("order must be 2 or 4")
    points = _as_points(points)
    lap, values = _laplacian(fmap, points, step, outer_step, order)
    if not refine:
        return lap, values, None
    fine, _ = _laplacian(fmap, points, 0.5 * step, 0.5 * outer_step, order)
    factor = 2.0**order
    refined = (factor * fine - lap) / (factor - 1.0)
    return refined, values, np.max(np.abs(refined - fine), axis=-1)


def laplace_beltrami(fmap, p, step=DEFAULT_STEP, outer_step=DEFAULT_OUTER_STEP, refine=False,
                     order=2, full_output=False):
    """Laplace-Beltrami operator of the vector-valued ``fmap`` at one point.

    With ``full_output`` the pair ``(lap, error_estimate)`` is returned; the
    estimate is ``None`` unless ``refine`` is set.
    """
    lap, _, err = laplace_beltrami_batch(fmap, p, step, outer_step, order, refine)
    if full_output:
        return lap[0], (None if err is None else float(err[0]))
    return lap[0]


def ctr_residuals(fmap, points, step=DEFAULT_STEP, order=4):
    """``<J f, d_i f>`` at each point and chart direction, shape ``(P, k)``."""
    f0, jac, _ = jets(fmap, points, step, order)
    return np.einsum("pd,pkd->pk", complex_structure(f0), jac)
