"""The profile curve gamma = (cos s e^{i s1}, sin s e^{i s2}) in S^3.

Notation used throughout:

* ``N(s) = 1 + (C1^2 - 1) cos^2 s`` (numerator of Theta);
* ``P(s) = cos^{2k1+2} s  sin^{2k2+2} s``;
* ``D(s) = C2 P(s) - N(s)`` (denominator of Theta), so ``Theta = N / D``
  and ``1 + Theta = C2 P / D``.

Derivatives with respect to ``s`` are named ``*_ds``; arc-length derivatives
carry no suffix on the curve objects (``ds``, ``d2s``, ``ds1``, ...).

Along arc length the curve satisfies ``s'' = -(N/P)'/(2 C2)`` with first
integral ``(s')^2 = D / (C2 P)``; the phases obey ``s1' = 1/(sqrt(C2)
a^{k1+2} b^{k2})`` and ``s2' = C1/(sqrt(C2) a^{k1} b^{k2+2})`` on both
branches. Integrating this smooth second-order form crosses the turning
points of ``s`` (the joints, where ``D = 0``) without special handling; the
``+``/``-`` branch is the sign of ``s'``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, optimize

from . import _kernels
from ._dopri import BUFFER_FULL, STEP_UNDERFLOW, dopri_run
from .errors import EmptyDomain, EventLocalizationFailure, OutOfSpan, OutsideDomain, SingularDenominator

SCAN_POINTS = 4097
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ProfileParams:
    k1: float
    k2: float
    C1: float
    C2: float

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError(f"k1, k2 must be positive, got {self.k1}, {self.k2}")
        if not self.C2 > 0:
            raise ValueError(f"C2 must be positive, got {self.C2}")

    @classmethod
    def auto(cls, k1, k2, C1, multiplier):
        """Parameters with ``C2 = multiplier * c2_min(k1, k2, C1)``."""
        return cls(k1, k2, C1, multiplier * c2_min(k1, k2, C1)[0])

    def to_json(self):
        return {"k1": self.k1, "k2": self.k2, "C1": self.C1, "C2": self.C2}


@dataclass(frozen=True)
class DomainJ:
    s_lo: float
    s_hi: float
    lo_kind: str = "denominator_root"
    hi_kind: str = "denominator_root"
    s_peak: float = float("nan")  # maximizer of D
    extra_components: tuple = ()

    @property
    def width(self):
        return self.s_hi - self.s_lo

    @property
    def midpoint(self):
        return 0.5 * (self.s_lo + self.s_hi)

    def to_json(self):
        return {
            "s_lo": self.s_lo, "s_hi": self.s_hi, "lo_kind": self.lo_kind, "hi_kind": self.hi_kind,
            "s_peak": self.s_peak, "extra_components": [list(c) for c in self.extra_components],
        }


@dataclass(frozen=True)
class ProfileSample:
    t_arc: float
    s: float
    s1: float
    s2: float
    branch_sign: int

    @property
    def a(self):
        return math.cos(self.s)

    @property
    def b(self):
        return math.sin(self.s)


# ---------------------------------------------------------------------------
# closed forms in s


def _numer(s, C1):
    return 1.0 + (C1 * C1 - 1.0) * np.cos(s) ** 2


def _pfac(s, k1, k2):
    return np.cos(s) ** (2 * k1 + 2) * np.sin(s) ** (2 * k2 + 2)


def _dlog_numer(s, C1):
    u = C1 * C1 - 1.0
    return -2.0 * u * np.cos(s) * np.sin(s) / _numer(s, C1)


def _dlog_pfac(s, k1, k2):
    return -(2 * k1 + 2) * np.tan(s) + (2 * k2 + 2) / np.tan(s)


def ratio(s, k1, k2, C1):
    """``N(s) / P(s)``; its minimum over (0, pi/2) is ``c2_min``."""
    return _numer(s, C1) / _pfac(s, k1, k2)


def ratio_ds(s, k1, k2, C1):
    return ratio(s, k1, k2, C1) * (_dlog_numer(s, C1) - _dlog_pfac(s, k1, k2))


def denom(s, params):
    """Denominator ``C2 P(s) - N(s)`` of Theta, with ``P = cos^{2k1+2}s sin^{2k2+2}s``."""
    p = params
    return p.C2 * _pfac(s, p.k1, p.k2) - _numer(s, p.C1)


def denom_ds(s, params):
    p = params
    return (p.C2 * _pfac(s, p.k1, p.k2) * _dlog_pfac(s, p.k1, p.k2)
            - _numer(s, p.C1) * _dlog_numer(s, p.C1))


def theta(s, params):
    """``Theta(s) = N(s) / D(s)``; raises OutsideDomain where ``D <= 0``."""
    p = params
    n = _numer(s, p.C1)
    d = p.C2 * _pfac(s, p.k1, p.k2) - n
    # a denominator within rounding of zero counts as a boundary point
    floor = 8.0 * np.finfo(float).eps * (p.C2 * _pfac(s, p.k1, p.k2) + np.abs(n))
    if np.any(np.asarray(d) <= floor):
        raise OutsideDomain(f"denominator of Theta is not positive at s={s}")
    return n / d


def theta_ds(s, params):
    """Closed-form ``dTheta/ds``."""
    n = _numer(s, params.C1)
    d = denom(s, params)
    return (n * _dlog_numer(s, params.C1) * d - n * denom_ds(s, params)) / (d * d)


def branch_derivatives(s, params, sign=1):
    """``(ds1/ds, ds2/ds, dt/ds)`` on the ``sign`` branch.

    ``dt/ds`` is returned as the positive speed factor ``sqrt(1 + Theta)``;
    on the ``-`` branch ``s`` decreases along the curve.
    """
    th = theta(s, params)
    root = np.sqrt(denom(s, params))
    return (sign * np.tan(s) / root, sign * params.C1 / np.tan(s) / root, np.sqrt(1.0 + th))


def arc_rates(s, params):
    """``(s1', s2', |s'|)`` with respect to arc length."""
    p = params
    a, b = np.cos(s), np.sin(s)
    rc2 = math.sqrt(p.C2)
    ds1 = 1.0 / (rc2 * a ** (p.k1 + 2) * b**p.k2)
    ds2 = p.C1 / (rc2 * a**p.k1 * b ** (p.k2 + 2))
    speed = np.sqrt(np.maximum(denom(s, p), 0.0) / (p.C2 * _pfac(s, p.k1, p.k2)))
    return ds1, ds2, speed


def steady_c1sq_minus_1(s, k1, k2):
    """``C1^2 - 1`` for which ``s`` is a steady-magnitude angle.

    This is the critical-point condition of ``N/P`` solved for ``C1^2 - 1``;
    ``1 +`` the result must be nonnegative for a real ``C1``.
    """
    t = math.tan(s)
    bottom = 2 * k1 * t - (2 * k2 + 2) / t
    if abs(bottom) <= 1e-14 * (2 * k1 * t + (2 * k2 + 2) / t):
        raise SingularDenominator(f"tan^2 s = (k2+1)/k1 at s={s}")
    return (-(2 * k1 + 2) * t + (2 * k2 + 2) / t) / bottom / math.cos(s) ** 2


# ---------------------------------------------------------------------------
# one-dimensional search


def golden_section(f, lo, hi, tol=1e-10, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns the abscissa."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def _scan_grid():
    return HALF_PI * (np.arange(1, SCAN_POINTS + 1) / (SCAN_POINTS + 1))


def _refine_critical(f, df, grid, i):
    """Golden-section on the grid cell around index ``i``, then a bracketed
    root of ``df`` to machine precision."""
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    x = golden_section(f, lo, hi, tol=1e-9)
    w = 1e-7
    a, b = max(lo, x - w), min(hi, x + w)
    fa, fb = df(a), df(b)
    if fa * fb > 0:
        a, b = lo, hi
        fa, fb = df(a), df(b)
    if fa * fb > 0:
        return x
    return optimize.brentq(df, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def c2_min(k1, k2, C1):
    """Smallest ``C2`` for which Theta has a nonempty domain.

    Returns ``(min N/P, argmin)``; at that ``C2`` the denominator has a
    double root at the argmin.
    """
    grid = _scan_grid()
    vals = ratio(grid, k1, k2, C1)
    i = int(np.argmin(vals))
    s_star = _refine_critical(
        lambda x: ratio(x, k1, k2, C1), lambda x: ratio_ds(x, k1, k2, C1), grid, i
    )
    return float(ratio(s_star, k1, k2, C1)), float(s_star)


def find_domain(params):
    """Connected component of ``{D > 0}`` containing the maximizer of ``D``.

    Other positive components seen on the scan grid are reported in
    ``extra_components`` as grid-resolution brackets.
    """
    grid = _scan_grid()
    d = denom(grid, params)
    i = int(np.argmax(d))
    s_peak = _refine_critical(lambda x: -denom(x, params), lambda x: denom_ds(x, params), grid, i)
    if not denom(s_peak, params) > 0:
        raise EmptyDomain(f"denominator of Theta is never positive for {params}")
    neg = d <= 0
    left = np.flatnonzero(neg & (grid < s_peak))
    right = np.flatnonzero(neg & (grid > s_peak))
    # D -> -N < 0 at both ends of (0, pi/2), so both brackets exist
    lo_bracket = grid[left[-1]] if len(left) else grid[0] * 1e-3
    hi_bracket = grid[right[0]] if len(right) else HALF_PI - (HALF_PI - grid[-1]) * 1e-3
    f = lambda x: float(denom(x, params))
    kw = dict(xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    s_lo = optimize.brentq(f, lo_bracket, s_peak, **kw)
    s_hi = optimize.brentq(f, s_peak, hi_bracket, **kw)

    extras = []
    pos = ~neg
    edges = np.flatnonzero(np.diff(pos.astype(int)))
    starts = [grid[e + 1] for e in edges if pos[e + 1]]
    ends = [grid[e] for e in edges if pos[e]]
    for a, b in zip(starts, ends):
        if b < s_lo or a > s_hi:
            extras.append((float(a), float(b)))
    return DomainJ(s_lo=float(s_lo), s_hi=float(s_hi), s_peak=float(s_peak),
                   extra_components=tuple(extras))


def half_period(params, domain=None):
    """Arc length between consecutive joints, ``int sqrt(1 + Theta) ds`` over J.

    The substitution ``s = mid + half * sin(phi)`` removes the inverse
    square-root singularities at the two simple roots of ``D``.
    """
    dom = domain or find_domain(params)
    mid, half = dom.midpoint, 0.5 * dom.width

    def integrand(phi):
        s = mid + half * math.sin(phi)
        d = float(denom(s, params))
        if d <= 0:
            return 0.0
        return math.sqrt(params.C2 * float(_pfac(s, params.k1, params.k2)) / d) * half * math.cos(phi)

    val, _ = integrate.quad(integrand, -0.5 * math.pi, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


# ---------------------------------------------------------------------------
# assembled curve


@dataclass(frozen=True, eq=False)
class GammaJet:
    """Curve data at arc-length values ``t``; arrays share the shape of ``t``."""

    t: np.ndarray
    s: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    a: np.ndarray
    b: np.ndarray
    ds: np.ndarray
    d2s: np.ndarray
    da: np.ndarray
    d2a: np.ndarray
    db: np.ndarray
    d2b: np.ndarray
    ds1: np.ndarray
    d2s1: np.ndarray
    ds2: np.ndarray
    d2s2: np.ndarray
    branch_sign: np.ndarray

    @property
    def gamma1(self):
        return self.a * np.exp(1j * self.s1)

    @property
    def gamma2(self):
        return self.b * np.exp(1j * self.s2)

    @property
    def dgamma1(self):
        return (self.da + 1j * self.a * self.ds1) * np.exp(1j * self.s1)

    @property
    def dgamma2(self):
        return (self.db + 1j * self.b * self.ds2) * np.exp(1j * self.s2)

    @property
    def d2gamma1(self):
        re = self.d2a - self.a * self.ds1**2
        im = 2.0 * self.da * self.ds1 + self.a * self.d2s1
        return (re + 1j * im) * np.exp(1j * self.s1)

    @property
    def d2gamma2(self):
        re = self.d2b - self.b * self.ds2**2
        im = 2.0 * self.db * self.ds2 + self.b * self.d2s2
        return (re + 1j * im) * np.exp(1j * self.s2)


def _closed_form_jet(s, v, params):
    """Arc-length derivatives from ``s`` and ``s'`` via the closed forms."""
    p = params
    a, b = np.cos(s), np.sin(s)
    d2s = -ratio_ds(s, p.k1, p.k2, p.C1) / (2.0 * p.C2)
    da, db = -b * v, a * v
    d2a = -a * v * v - b * d2s
    d2b = -b * v * v + a * d2s
    rc2 = math.sqrt(p.C2)
    ds1 = 1.0 / (rc2 * a ** (p.k1 + 2) * b**p.k2)
    ds2 = p.C1 / (rc2 * a**p.k1 * b ** (p.k2 + 2))
    d2s1 = -ds1 * ((p.k1 + 2) * da / a + p.k2 * db / b)
    d2s2 = -ds2 * (p.k1 * da / a + (p.k2 + 2) * db / b)
    return dict(a=a, b=b, d2s=d2s, da=da, db=db, d2a=d2a, d2b=d2b,
                ds1=ds1, ds2=ds2, d2s1=d2s1, d2s2=d2s2)


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """An integrated profile curve with a C^2 piecewise-quintic dense output.

    Knots are integrator step endpoints; at each knot the interpolant matches
    ``s, s', s''`` and ``s_i, s_i', s_i''`` (second derivatives from the
    closed forms), so it can be differentiated by finite differences.
    """

    params: ProfileParams
    domain: DomainJ
    knots: np.ndarray = field(repr=False)
    coef: np.ndarray = field(repr=False)  # (n_knots - 1, 3, 6) for s, s1, s2
    joints: tuple
    initial_sign: int
    sample_dt: float
    steady: bool = False

    @property
    def t_start(self):
        return float(self.knots[0])

    @property
    def t_end(self):
        return float(self.knots[-1])

    def branch_sign_at(self, t):
        t = np.asarray(t, dtype=float)
        flips = np.searchsorted(np.asarray(self.joints, dtype=float), t, side="right")
        if self.steady:
            return np.zeros(t.shape, dtype=int)
        return self.initial_sign * np.where(flips % 2 == 0, 1, -1)

    def sample_times(self):
        n = int(math.floor((self.t_end - self.t_start) / self.sample_dt + 1e-9))
        t = self.t_start + self.sample_dt * np.arange(n + 1)
        t = np.union1d(t, np.asarray(self.joints, dtype=float))
        return t[t <= self.t_end]

    def sample_table(self):
        """Columns ``t_arc, s, s1, s2, a, b, branch_sign`` at uniform spacing plus joints."""
        t = self.sample_times()
        g = gamma_eval(self, t)
        return {"t_arc": t, "s": g.s, "s1": g.s1, "s2": g.s2, "a": g.a, "b": g.b,
                "branch_sign": g.branch_sign}

    @property
    def samples(self):
        tab = self.sample_table()
        return [ProfileSample(float(t), float(s), float(s1), float(s2), int(sg))
                for t, s, s1, s2, sg in zip(tab["t_arc"], tab["s"], tab["s1"], tab["s2"],
                                            tab["branch_sign"])]

    def to_json(self):
        return {"params": self.params.to_json(), "domain": self.domain.to_json(),
                "joints": list(self.joints), "t_start": self.t_start, "t_end": self.t_end,
                "steady": self.steady}


def _knot_derivatives(t, y, params):
    s, v = y[:, 0], y[:, 1]
    cf = _closed_form_jet(s, v, params)
    vals = np.stack([s, y[:, 2], y[:, 3]], axis=1)
    d1 = np.stack([v, cf["ds1"], cf["ds2"]], axis=1)
    d2 = np.stack([cf["d2s"], cf["d2s1"], cf["d2s2"]], axis=1)
    coef = np.stack([_kernels.hermite_coefficients(t, vals[:, j], d1[:, j], d2[:, j])
                     for j in range(3)], axis=1)
    return np.ascontiguousarray(coef)


def _run_integrator(y0, t_stop, params, rtol, atol, knot_dt, max_changes):
    p = params
    est = int(math.ceil(t_stop / knot_dt)) + 64
    Ts, Ys = [], []
    t0, y, h, changes = 0.0, np.asarray(y0, dtype=float), min(knot_dt, 1e-3), 0
    while True:
        T = np.empty(est)
        Y = np.empty((est, 4))
        n, status, h, changes = dopri_run(y, t0, t_stop, h, rtol, atol, knot_dt, 0.0,
                                          max_changes, p.k1, p.k2, p.C1, p.C2, T, Y, changes)
        if Ts:
            T, Y = T[1:n], Y[1:n]
        else:
            T, Y = T[:n], Y[:n]
        Ts.append(T)
        Ys.append(Y)
        if status == STEP_UNDERFLOW:
            raise EventLocalizationFailure(f"step size underflow at t={T[-1]:.6g}")
        if status != BUFFER_FULL:
            break
        t0, y = float(T[-1]), Y[-1].copy()
    return np.concatenate(Ts), np.concatenate(Ys)


def _locate_turns(knots, coef, y):
    """Zeros of ``s'`` of the interpolant inside knot intervals with a sign change."""
    v = y[:, 1]
    turns = []
    idx = np.flatnonzero((v[:-1] * v[1:] < 0) | ((v[1:] == 0) & (v[:-1] != 0)))
    for i in idx:
        if v[i + 1] == 0.0:
            turns.append(float(knots[i + 1]))
            continue

        def ds(t, i=i):
            return float(_kernels.hermite_eval_numpy(knots, coef[:, 0, :], np.array([t]))[1][0])

        a, b = float(knots[i]), float(knots[i + 1])
        if ds(a) * ds(b) > 0:
            raise EventLocalizationFailure(f"turning point in [{a}, {b}] not bracketed")
        try:
            root = optimize.brentq(ds, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
        except (RuntimeError, ValueError) as exc:
            raise EventLocalizationFailure(str(exc)) from exc
        turns.append(float(root))
    return turns


def integrate_profile(params, s_start=None, s1_0=0.0, s2_0=0.0, n_joints=0, t_max=None,
                      sign=1, rtol=1e-10, atol=1e-12, sample_dt=0.005):
    """Integrate the global profile curve in arc length.

    Starting at ``s_start`` (default: the maximizer of ``D``) on the ``sign``
    branch, the curve runs until ``n_joints`` joints have been crossed and
    ends at the next turning point of ``s``. With ``t_max`` the curve instead
    spans ``[0, t_max]`` and records every joint inside it.
    """
    dom = find_domain(params)
    if s_start is None:
        s_start = dom.s_peak
    if not dom.s_lo < s_start < dom.s_hi:
        raise OutsideDomain(f"s_start={s_start} is not inside ({dom.s_lo}, {dom.s_hi})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n_joints < 0:
        raise ValueError("n_joints must be nonnegative")
    v0 = sign * float(arc_rates(s_start, params)[2])
    y0 = np.array([s_start, v0, s1_0, s2_0])
    if t_max is None:
        t_stop = half_period(params, dom) * (n_joints + 2) + 4 * sample_dt
        max_changes = n_joints + 1
    else:
        t_stop = float(t_max)
        max_changes = 1 << 60
    knots, y = _run_integrator(y0, t_stop, params, rtol, atol, sample_dt, max_changes)
    coef = _knot_derivatives(knots, y, params)
    turns = _locate_turns(knots, coef, y)

    if t_max is None:
        if len(turns) < n_joints + 1:
            raise EventLocalizationFailure(
                f"found {len(turns)} turning points, expected {n_joints + 1}")
        t_end = turns[n_joints]
        turns = turns[:n_joints]
        keep = knots < t_end - 1e-12 * max(1.0, t_end)
        val, _, _ = _kernels.hermite_eval_numpy(knots, coef, np.array([t_end]))
        end_state = np.array([val[0, 0], 0.0, val[0, 1], val[0, 2]])
        knots = np.append(knots[keep], t_end)
        y = np.vstack([y[keep], end_state])
        coef = _knot_derivatives(knots, y, params)

    return ProfileCurve(params=params, domain=dom, knots=knots, coef=coef, joints=tuple(turns),
                        initial_sign=int(sign), sample_dt=float(sample_dt))


def steady_profile(k1, k2, C1, t_span=2.0 * math.pi, sample_dt=0.005):
    """Steady-magnitude curve at ``C2 = c2_min``: ``s`` frozen at the argmin,
    phases advancing linearly."""
    c2, s_star = c2_min(k1, k2, C1)
    params = ProfileParams(k1, k2, C1, c2)
    n = int(math.ceil(t_span / sample_dt))
    knots = np.linspace(0.0, t_span, n + 1)
    ds1, ds2, _ = arc_rates(s_star, params)
    y = np.column_stack([np.full_like(knots, s_star), np.zeros_like(knots), ds1 * knots, ds2 * knots])
    coef = _knot_derivatives(knots, y, params)
    dom = DomainJ(s_lo=s_star, s_hi=s_star, lo_kind="double_root", hi_kind="double_root", s_peak=s_star)
    return ProfileCurve(params=params, domain=dom, knots=knots, coef=coef, joints=(),
                        initial_sign=0, sample_dt=float(sample_dt), steady=True)


def gamma_eval(curve, t):
    """Evaluate the curve and its arc-length derivatives at ``t``.

    ``s, s', s1, s2`` come from the dense output; every second derivative and
    the phase rates come from the closed forms, not from differencing.
    """
    t_arr = np.asarray(t, dtype=float)
    flat = t_arr.reshape(-1)
    span_tol = 1e-12 * max(1.0, abs(curve.t_end))
    if flat.size and (flat.min() < curve.t_start - span_tol or flat.max() > curve.t_end + span_tol):
        raise OutOfSpan(f"t outside [{curve.t_start}, {curve.t_end}]")
    val, d1, _ = _kernels.hermite_eval(curve.knots, curve.coef, flat)
    s, v = val[:, 0], d1[:, 0]
    cf = _closed_form_jet(s, v, curve.params)
    shape = t_arr.shape
    r = lambda x: np.reshape(x, shape)
    return GammaJet(
        t=t_arr, s=r(s), s1=r(val[:, 1]), s2=r(val[:, 2]), a=r(cf["a"]), b=r(cf["b"]),
        ds=r(v), d2s=r(cf["d2s"]), da=r(cf["da"]), d2a=r(cf["d2a"]), db=r(cf["db"]),
        d2b=r(cf["d2b"]), ds1=r(cf["ds1"]), d2s1=r(cf["d2s1"]), ds2=r(cf["ds2"]),
        d2s2=r(cf["d2s2"]), branch_sign=r(curve.branch_sign_at(flat)),
    )
