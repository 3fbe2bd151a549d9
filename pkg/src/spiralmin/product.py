"""Spiral products G(t, x, y) = (gamma1(t) f1(x), gamma2(t) f2(y))."""

from dataclasses import dataclass
import weakref

import numpy as np

from . import _kernels, numgeo
from .catalog import ImmersionSpec, validate_entry
from .errors import C1NotMinusOne, DimensionMismatch, InputNotValidated, IntermediateNotCTR
from .grids import Grid, interior_grid
from .profile import gamma_eval

CTR_TOL = 1e-6
_validated = weakref.WeakKeyDictionary()


def as_complex(vals):
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    return vals.view(np.complex128)


def as_interleaved(z):
    return np.ascontiguousarray(z, dtype=np.complex128).view(np.float64)


@dataclass(frozen=True, eq=False)
class SpiralProduct:
    left: ImmersionSpec
    right: ImmersionSpec
    curve: object  # ProfileCurve
    spec: ImmersionSpec

    @property
    def k(self):
        return self.spec.k

    @property
    def evaluate(self):
        return self.spec.evaluate

    @property
    def chart_lo(self):
        return self.spec.chart_lo

    @property
    def chart_hi(self):
        return self.spec.chart_hi

    def split_point(self, point):
        point = np.asarray(point, dtype=float)
        k1 = self.left.k
        return point[..., 0], point[..., 1:1 + k1], point[..., 1 + k1:]

    def to_json(self):
        out = self.spec.to_json()
        out.update({
            "left": self.left.name, "right": self.right.name,
            "sphere_dim": self.spec.sphere_dim,
            "curve": self.curve.to_json(),
        })
        return out


def _check_validated(spec, tol):
    if spec in _validated:
        rep = _validated[spec]
    else:
        rep = validate_entry(spec, grid_density=6, tol=tol, cap=300)
        _validated[spec] = rep
    if not rep.passed:
        raise InputNotValidated(
            f"{spec.name} failed validation (takahashi {rep.takahashi_residual_max:.2e}, "
            f"ctr {rep.ctr_residual_max}, sphere {rep.sphere_residual_max:.2e})")


def build(left, right, curve, validate=True, validation_tol=1e-4):
    """Assemble the spiral product of two C-totally real immersions.

    The product has dimension ``1 + k1 + k2`` and lands in the unit sphere of
    ``C^{n1+1} + C^{n2+1}``. With ``validate`` both inputs must claim
    C-totally real and pass :func:`~spiralmin.catalog.validate_entry`.
    """
    p = curve.params
    if p.k1 != left.k or p.k2 != right.k:
        raise DimensionMismatch(
            f"curve has (k1, k2)=({p.k1}, {p.k2}) but inputs have ({left.k}, {right.k})")
    for spec in (left, right):
        if not spec.is_complex:
            raise InputNotValidated(f"{spec.name} is real-valued; complexify it first")
    if validate:
        for spec in (left, right):
            if not spec.c_totally_real:
                raise InputNotValidated(f"{spec.name} does not claim to be C-totally real")
            _check_validated(spec, validation_tol)

    k1, k2 = left.k, right.k
    knots, coef = curve.knots, curve.coef

    def evaluate(X):
        X = np.asarray(X, dtype=float)
        val, _, _ = _kernels.hermite_eval(knots, coef, X[:, 0])
        s, s1, s2 = val[:, 0], val[:, 1], val[:, 2]
        g1 = np.cos(s) * np.exp(1j * s1)
        g2 = np.sin(s) * np.exp(1j * s2)
        f1 = as_complex(left.evaluate(X[:, 1:1 + k1]))
        f2 = as_complex(right.evaluate(X[:, 1 + k1:]))
        return as_interleaved(np.concatenate([g1[:, None] * f1, g2[:, None] * f2], axis=1))

    c1 = float(p.C1)
    spec = ImmersionSpec(
        name=f"spiral({left.name},{right.name};C1={c1:g},C2={p.C2:.6g})",
        k=1 + k1 + k2, ambient_dim=left.ambient_dim + right.ambient_dim, is_complex=True,
        chart_lo=np.concatenate([[curve.t_start], left.chart_lo, right.chart_lo]),
        chart_hi=np.concatenate([[curve.t_end], left.chart_hi, right.chart_hi]),
        evaluate=evaluate, minimal=True, c_totally_real=(c1 == -1.0),
        claimed_eigenvalue=float(1 + k1 + k2),
    )
    return SpiralProduct(left=left, right=right, curve=curve, spec=spec)


def warped_metric(prod, t, x, y, step=numgeo.DEFAULT_STEP):
    """Block-diagonal metric ``dt^2 + a(t)^2 g1(x) + b(t)^2 g2(y)``."""
    g = gamma_eval(prod.curve, float(t))
    g1 = numgeo.pullback_metric(prod.left, x, step).entries
    g2 = numgeo.pullback_metric(prod.right, y, step).entries
    k1, k2 = len(g1), len(g2)
    m = np.zeros((1 + k1 + k2, 1 + k1 + k2))
    m[0, 0] = 1.0
    m[1:1 + k1, 1:1 + k1] = float(g.a) ** 2 * g1
    m[1 + k1:, 1 + k1:] = float(g.b) ** 2 * g2
    return numgeo.metric_sample(m)


def _points_of(subject, grid, density):
    if grid is None:
        return interior_grid(subject, density=density, cap=2000).points
    if isinstance(grid, Grid):
        return grid.points
    return np.atleast_2d(np.asarray(grid, dtype=float))


def c_totally_real_test(subject, grid=None, tol=CTR_TOL, density=6):
    """Max of ``|<J G, d_i G>|`` over the grid and all chart directions."""
    pts = _points_of(subject, grid, density)
    res = float(np.max(np.abs(numgeo.ctr_residuals(subject, pts))))
    return res, res <= tol


def iterate_products(inputs, curves, validate=True, ctr_tol=CTR_TOL):
    """Left-associated fold ``((L1 x_b1 L2) x_b2 L3) ...`` with ``C1 = -1`` curves.

    Every intermediate must remain C-totally real; it is also validated as a
    generic immersion before being fed to the next stage.
    """
    inputs = list(inputs)
    curves = list(curves)
    if len(curves) != len(inputs) - 1:
        raise DimensionMismatch(f"need {len(inputs) - 1} curves for {len(inputs)} inputs")
    for c in curves:
        if c.params.C1 != -1:
            raise C1NotMinusOne(f"curve has C1={c.params.C1}; iterated products need C1 = -1")
    current = inputs[0]
    prod = None
    for nxt, curve in zip(inputs[1:], curves):
        prod = build(current, nxt, curve, validate=validate)
        res, ok = c_totally_real_test(prod, tol=ctr_tol, density=3)
        if not ok:
            raise IntermediateNotCTR(f"{prod.spec.name}: <JG, dG> reaches {res:.3e}")
        current = prod.spec
    return prod
