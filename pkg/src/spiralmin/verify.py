"""Takahashi residuals, the split Laplacian cross-check and closed-form identities."""

from dataclasses import dataclass, field
import math
import time

import numpy as np
from scipy import optimize

from . import numgeo
from .errors import NoSteadyAngle, SingularDenominator
from .grids import Grid, interior_grid
from .profile import (
    ProfileParams, _numer, _pfac, branch_derivatives, c2_min, denom, find_domain, gamma_eval,
    ratio, ratio_ds, theta, theta_ds, steady_c1sq_minus_1,
)

LAPLACIAN_TOL = 1e-4
IDENTITY_TOL = 1e-8
CHUNK = 256


@dataclass
class VerificationReport:
    subject: str
    expected_lambda: float
    grid: str
    n_points: int
    residual_max: float
    residual_mean: float
    eigen_estimate: float
    tol: float
    per_identity: dict = field(default_factory=dict)
    identity_tol: float = IDENTITY_TOL
    passed: bool = False
    runtime_seconds: float = 0.0

    @property
    def pass_(self):
        return self.passed

    def to_json(self, include_runtime=False):
        out = {
            "subject": self.subject, "expected_lambda": self.expected_lambda, "grid": self.grid,
            "n_points": self.n_points, "residual_max": self.residual_max,
            "residual_mean": self.residual_mean, "eigen_estimate": self.eigen_estimate,
            "tol": self.tol, "per_identity": dict(self.per_identity),
            "identity_tol": self.identity_tol, "pass": self.passed,
        }
        if include_runtime:
            out["runtime_seconds"] = self.runtime_seconds
        return out


def _subject_name(subject):
    spec = getattr(subject, "spec", subject)
    return getattr(spec, "name", type(subject).__name__)


def _grid_of(subject, grid):
    if grid is None:
        return interior_grid(subject)
    if isinstance(grid, Grid):
        return grid
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    return Grid(points=pts, kind="explicit", description=f"explicit n={len(pts)}")


def laplacian_on_grid(subject, points, step=numgeo.DEFAULT_STEP,
                      outer_step=numgeo.DEFAULT_OUTER_STEP, order=2, refine=False):
    """Chunked :func:`numgeo.laplace_beltrami_batch`; returns ``(lap, values)``."""
    laps, vals = [], []
    for i in range(0, len(points), CHUNK):
        lap, v, _ = numgeo.laplace_beltrami_batch(subject, points[i:i + CHUNK], step, outer_step,
                                                  order, refine)
        laps.append(lap)
        vals.append(v)
    return np.concatenate(laps), np.concatenate(vals)


def takahashi_residual(subject, expected_lambda, grid=None, step=numgeo.DEFAULT_STEP,
                       outer_step=numgeo.DEFAULT_OUTER_STEP, tol=LAPLACIAN_TOL, order=2,
                       refine=False, identities=None, identity_tol=IDENTITY_TOL):
    """Check ``Delta f = -lambda f`` pointwise on an interior grid.

    The residual at a point is ``max |Delta f + lambda f|`` over ambient
    components, with ``Delta`` the Laplace-Beltrami operator of the subject's
    own induced metric. ``identities`` may carry extra named residuals (for
    instance from :func:`identity_suite`) which then also gate the verdict.
    """
    t0 = time.perf_counter()
    g = _grid_of(subject, grid)
    lap, vals = laplacian_on_grid(subject, g.points, step, outer_step, order, refine)
    res = np.max(np.abs(lap + expected_lambda * vals), axis=1)
    eig = -np.sum(lap * vals, axis=1) / np.sum(vals * vals, axis=1)
    per = {k: float(v) for k, v in (identities or {}).items()}
    rmax = float(res.max())
    ok = rmax <= tol and all(v <= identity_tol for v in per.values())
    return VerificationReport(
        subject=_subject_name(subject), expected_lambda=float(expected_lambda),
        grid=g.description, n_points=len(g.points), residual_max=rmax,
        residual_mean=float(res.mean()), eigen_estimate=float(eig.mean()), tol=float(tol),
        per_identity=per, identity_tol=float(identity_tol), passed=bool(ok),
        runtime_seconds=time.perf_counter() - t0,
    )


def _as_c(vals):
    return np.ascontiguousarray(vals, dtype=float).view(np.complex128)


def split_laplacian(prod, points, eigen_override=None):
    """Laplacian of a spiral product assembled from its factors.

    ``eigen_override = (lam1, lam2)`` replaces the catalog eigenvalues; it
    exists to show the comparison is sensitive to them.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    t, x, y = prod.split_point(pts)
    lam1, lam2 = eigen_override or (prod.left.claimed_eigenvalue, prod.right.claimed_eigenvalue)
    k1, k2 = prod.left.k, prod.right.k
    g = gamma_eval(prod.curve, t)
    f1 = _as_c(prod.left.evaluate(x))
    f2 = _as_c(prod.right.evaluate(y))
    drift = k1 * g.da / g.a + k2 * g.db / g.b
    c1 = (-lam1 / g.a**2) * g.gamma1 + g.d2gamma1 + drift * g.dgamma1
    c2 = (-lam2 / g.b**2) * g.gamma2 + g.d2gamma2 + drift * g.dgamma2
    z = np.concatenate([c1[:, None] * f1, c2[:, None] * f2], axis=1)
    return np.ascontiguousarray(z).view(np.float64)


def split_laplacian_check(prod, point, eigen_override=None, step=numgeo.DEFAULT_STEP,
                          outer_step=numgeo.DEFAULT_OUTER_STEP, order=4):
    """``(direct, split, diff)``; accepts one point or a batch of points.

    The direct side defaults to the fourth-order stencil so that ``diff``
    measures disagreement between the two routes, not O(h^2) truncation.
    """
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    direct, _ = laplacian_on_grid(prod, pts, step, outer_step, order)
    split = split_laplacian(prod, pts, eigen_override)
    diff = float(np.max(np.abs(direct - split)))
    if np.ndim(point) == 1:
        return direct[0], split[0], diff
    return direct, split, diff


# ---------------------------------------------------------------------------
# closed-form identity suite


@dataclass
class IdentityTerms:
    s: np.ndarray
    I: np.ndarray
    II: np.ndarray
    III: np.ndarray
    IV: np.ndarray
    X: np.ndarray
    im_part: np.ndarray
    re_part: np.ndarray

    COLUMNS = ("s", "I", "II", "III", "IV", "X", "im_part", "re_part")

    def columns(self):
        return {c: getattr(self, c) for c in self.COLUMNS}


@dataclass
class IdentityReport:
    params: ProfileParams
    sign: int
    residuals: dict
    terms: IdentityTerms
    tol: float

    @property
    def passed(self):
        return all(v <= self.tol for v in self.residuals.values())

    def to_json(self):
        return {"params": self.params.to_json(), "sign": self.sign, "n_points": len(self.terms.s),
                "residuals": dict(self.residuals), "tol": self.tol, "pass": self.passed}


def domain_grid(params, n_points=1000):
    dom = find_domain(params)
    return dom.s_lo + dom.width * (np.arange(n_points) + 0.5) / n_points


def identity_suite(params, s_grid=None, n_points=1000, sign=1, tol=IDENTITY_TOL):
    """Evaluate the term-by-term identities behind the main eigenvalue relation.

    Everything is closed-form in ``s``: the profile rates, ``s''`` from the
    first integral, ``s1''`` from differentiating ``s1'``, and ``Theta`` with
    its ``s``-derivative. Residual names map to their max absolute value over
    the grid (``theta_definition`` is relative to ``max(1, Theta)``).
    """
    p = params
    k1, k2, C1, C2 = p.k1, p.k2, p.C1, p.C2
    s = domain_grid(p, n_points) if s_grid is None else np.asarray(s_grid, dtype=float)
    if s.size == 0:
        raise ValueError("empty s grid")
    th = theta(s, p)  # raises OutsideDomain off the domain
    dth = theta_ds(s, p)
    a, b = np.cos(s), np.sin(s)
    n = _numer(s, C1)
    pf = _pfac(s, k1, k2)
    v = sign / np.sqrt(1.0 + th)
    da, db = -b * v, a * v
    rc2 = math.sqrt(C2)
    ds1 = 1.0 / (rc2 * a ** (k1 + 2) * b**k2)
    d2s1 = -ds1 * ((k1 + 2) * da / a + k2 * db / b)
    d2s = -ratio_ds(s, k1, k2, C1) / (2.0 * C2)
    # dot = d/ds, the parametrization used by the first integral and Theta
    dot1, dot2, _ = branch_derivatives(s, p, sign)

    I = -1.0 / (1.0 + th)
    X = b * dth / (2.0 * a * (1.0 + th) ** 2)
    II = b * n / (a * C2 * pf) * (k1 * b / a - k2 * a / b)
    III = (b**4 - C1**2 * a**4) / (a**2 * C2 * pf)
    IV = k1 * da**2 / a**2 + k2 * da * db / (a * b)
    a2_over_a = I + X
    im_part = 2 * da * ds1 + a * d2s1 + k1 * da * ds1 + k2 * (db / b) * a * ds1
    re_part = -k1 / a**2 + a2_over_a - ds1**2 + IV

    lhs = -k1 * b / a + k2 * a / b - (b**4 - C1**2 * a**4) / (a * b * (b**2 + C1**2 * a**2))
    rhs = -dth / (2.0 * th * (1.0 + th))
    target = -float(k1 + k2 + 1)
    res = {
        "X_split": np.abs(X - (II + III)),
        "a2_over_a": np.abs(a2_over_a - (-a * v * v - b * d2s) / a),
        "im_part": np.abs(im_part),
        "I_plus_III": np.abs(I + III - (-1.0 + 1.0 / (C2 * a ** (2 * k1 + 4) * b ** (2 * k2)))),
        "IV_plus_II": np.abs(IV + II - (k1 * b**2 / a**2 - k2)),
        "re_part": np.abs(re_part - target),
        "first_integral": np.abs(b**2 * dot2 - C1 * a**2 * dot1),
        "theta_ode": np.abs(lhs - rhs),
        "theta_definition": np.abs((a * dot1) ** 2 + (b * dot2) ** 2 - th) / np.maximum(1.0, th),
    }
    terms = IdentityTerms(s=s, I=I, II=II, III=III, IV=IV, X=X, im_part=im_part, re_part=re_part)
    return IdentityReport(params=p, sign=int(sign),
                          residuals={k: float(np.max(r)) for k, r in res.items()},
                          terms=terms, tol=float(tol))


# ---------------------------------------------------------------------------
# steady magnitudes


@dataclass
class SteadyReport:
    k1: int
    k2: int
    C1: float
    s: float
    C2: float
    c2_min: float
    s1p_sq: float
    s1p_sq_formula: float
    re_part: float
    residuals: dict
    tol: float

    @property
    def passed(self):
        return all(v <= self.tol for v in self.residuals.values())

    def to_json(self):
        return {"k1": self.k1, "k2": self.k2, "C1": self.C1, "s": self.s, "C2": self.C2,
                "c2_min": self.c2_min, "s1p_sq": self.s1p_sq,
                "s1p_sq_formula": self.s1p_sq_formula, "re_part": self.re_part,
                "residuals": dict(self.residuals), "tol": self.tol, "pass": self.passed}


def _steady_roots(k1, k2, C1):
    u = C1 * C1 - 1.0

    def g(s):
        try:
            return steady_c1sq_minus_1(s, k1, k2) - u
        except SingularDenominator:
            return math.nan

    pole = math.atan(math.sqrt((k2 + 1) / k1))
    grid = np.linspace(0.0, 0.5 * math.pi, 4097)[1:-1]
    vals = np.array([g(s) for s in grid])
    roots = []
    for i in range(len(grid) - 1):
        f0, f1 = vals[i], vals[i + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)) or grid[i] <= pole <= grid[i + 1]:
            continue
        if f0 == 0.0:
            roots.append(float(grid[i]))
        elif f0 * f1 < 0:
            r = optimize.brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if abs(g(r)) <= 1e-8 * max(1.0, abs(u)):
                roots.append(float(r))
    return roots


def steady_check(k1, k2, C1=None, s=None, tol=1e-9):
    """Steady-magnitude consistency at the angle ``s_C1``.

    Give ``C1`` to locate ``s_C1`` by root finding (the root minimizing
    ``N/P`` is used), or give ``s`` to derive ``C1 = +sqrt(1 + (C1^2-1))``
    from the critical-point condition. ``C2`` is set to ``N/P`` at that angle.
    """
    if (C1 is None) == (s is None):
        raise ValueError("give exactly one of C1 and s")
    if s is not None:
        if not 0.0 < s < 0.5 * math.pi:
            raise NoSteadyAngle(f"s={s} is not in (0, pi/2)")
        try:
            c1sq = 1.0 + steady_c1sq_minus_1(s, k1, k2)
        except SingularDenominator as exc:
            raise NoSteadyAngle(str(exc)) from exc
        if c1sq < 0:
            raise NoSteadyAngle(f"s={s} needs C1^2 = {c1sq:.6g} < 0")
        C1 = math.sqrt(c1sq)
        s_c1 = float(s)
    else:
        roots = _steady_roots(k1, k2, float(C1))
        if not roots:
            raise NoSteadyAngle(f"no steady angle in (0, pi/2) for k1={k1}, k2={k2}, C1={C1}")
        s_c1 = min(roots, key=lambda r: ratio(r, k1, k2, C1))
    C1 = float(C1)
    a, b = math.cos(s_c1), math.sin(s_c1)
    C2 = float(ratio(s_c1, k1, k2, C1))
    cmin, _ = c2_min(k1, k2, C1)
    ds1 = 1.0 / (math.sqrt(C2) * a ** (k1 + 2) * b**k2)
    s1p_sq = ds1 * ds1
    formula = -k1 * math.tan(s_c1) ** 2 + k2 + 1
    # with a' = b' = 0 and s'' = 0 the real part reduces to -k1/a^2 - s1'^2
    re_part = -k1 / a**2 - s1p_sq
    p = ProfileParams(k1, k2, C1, C2)
    d_scale = C2 * float(_pfac(s_c1, k1, k2))
    residuals = {
        "s1p_sq": abs(s1p_sq - formula),
        "s1p_sq_ratio_form": abs(s1p_sq - (b * b / (a * a)) / float(_numer(s_c1, C1))),
        "re_part": abs(re_part + (k1 + k2 + 1)),
        "denom": abs(float(denom(s_c1, p))) / d_scale,
        "critical_point": abs(float(ratio_ds(s_c1, k1, k2, C1))) / C2,
    }
    return SteadyReport(k1=k1, k2=k2, C1=C1, s=s_c1, C2=C2, c2_min=float(cmin), s1p_sq=s1p_sq,
                        s1p_sq_formula=formula, re_part=re_part, residuals=residuals,
                        tol=float(tol))
