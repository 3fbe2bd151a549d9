"""Concrete minimal immersions into unit spheres, plus the two combinators.

Complex-valued entries map into C^{n+1} (interleaved reals) and carry the
C-totally real claim where it holds; real-valued entries map into R^{N+1} and
become C-totally real after :func:`complexify`.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import numgeo
from .errors import EmptyInput, NotRealValued, ZeroDimensionalPart
from .grids import interior_grid

CHART_SHRINK = 0.1


@dataclass(frozen=True, eq=False)
class ImmersionSpec:
    name: str
    k: int
    ambient_dim: int  # number of real output components
    is_complex: bool
    chart_lo: np.ndarray
    chart_hi: np.ndarray
    evaluate: object = field(repr=False)
    minimal: bool = True
    c_totally_real: bool = False
    claimed_eigenvalue: float = 0.0

    @property
    def ambient_complex_dim(self):
        return self.ambient_dim // 2 if self.is_complex else None

    @property
    def sphere_dim(self):
        return self.ambient_dim - 1

    def __call__(self, points):
        return self.evaluate(points)

    def to_json(self):
        return {
            "name": self.name,
            "k": self.k,
            "ambient_complex_dim": self.ambient_complex_dim,
            "claims": {"minimal": self.minimal, "c_totally_real": self.c_totally_real},
            "claimed_eigenvalue": float(self.claimed_eigenvalue),
        }


@dataclass(frozen=True)
class CatalogReport:
    name: str
    takahashi_residual_max: float
    eigen_estimate: float
    ctr_residual_max: float | None
    sphere_residual_max: float
    grid: str
    tol: float
    passed: bool

    def to_json(self):
        return dict(self.__dict__)


def _interleave(re, im=None):
    out = np.zeros(re.shape[:-1] + (2 * re.shape[-1],))
    out[..., 0::2] = re
    if im is not None:
        out[..., 1::2] = im
    return out


def _sphere_coords(x):
    # (phi_1, ..., phi_{n-1}, theta) -> point of S^n in R^{n+1}
    P, n = x.shape
    out = np.empty((P, n + 1))
    sines = np.ones(P)
    for i in range(n - 1):
        out[:, i] = sines * np.cos(x[:, i])
        sines = sines * np.sin(x[:, i])
    out[:, n - 1] = sines * np.cos(x[:, n - 1])
    out[:, n] = sines * np.sin(x[:, n - 1])
    return out


def _sphere_box(n):
    lo = np.full(n, CHART_SHRINK)
    hi = np.full(n, math.pi - CHART_SHRINK)
    lo[-1] = -math.pi + CHART_SHRINK
    return lo, hi


def round_sphere(n):
    """Spherical-angle chart of S^n inside R^{n+1} (real-valued, totally geodesic)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lo, hi = _sphere_box(n)
    return ImmersionSpec(
        name=f"round_sphere:{n}", k=n, ambient_dim=n + 1, is_complex=False,
        chart_lo=lo, chart_hi=hi, evaluate=_sphere_coords,
        minimal=True, c_totally_real=False, claimed_eigenvalue=float(n),
    )


def real_equator(n):
    """S^n as the real locus of S^{2n+1} in C^{n+1}; C-totally real, eigenvalue n."""
    spec = complexify(round_sphere(n))
    return _renamed(spec, f"real_equator:{n}")


def legendrian_circle():
    """``t -> (e^{it}, e^{-it})/sqrt 2`` in S^3."""

    def evaluate(x):
        t = x[:, 0]
        r = 1.0 / math.sqrt(2.0)
        return _interleave(r * np.stack([np.cos(t), np.cos(t)], -1),
                           r * np.stack([np.sin(t), -np.sin(t)], -1))

    return ImmersionSpec(
        name="legendrian_circle", k=1, ambient_dim=4, is_complex=True,
        chart_lo=np.array([-math.pi]), chart_hi=np.array([math.pi]), evaluate=evaluate,
        minimal=True, c_totally_real=True, claimed_eigenvalue=1.0,
    )


def legendrian_torus():
    """``(u, v) -> (e^{iu}, e^{iv}, e^{-i(u+v)})/sqrt 3`` in S^5, a flat Legendrian torus."""

    def evaluate(x):
        ang = np.stack([x[:, 0], x[:, 1], -(x[:, 0] + x[:, 1])], -1)
        r = 1.0 / math.sqrt(3.0)
        return _interleave(r * np.cos(ang), r * np.sin(ang))

    return ImmersionSpec(
        name="legendrian_torus", k=2, ambient_dim=6, is_complex=True,
        chart_lo=np.full(2, -math.pi), chart_hi=np.full(2, math.pi), evaluate=evaluate,
        minimal=True, c_totally_real=True, claimed_eigenvalue=2.0,
    )


def complex_circle():
    """``t -> e^{it}`` in S^1 of C: minimal, but J f is tangent, so not C-totally real.

    This is the real circle of R^2 read as a complex number without
    complexifying first; it serves as the negative control for the product
    metric block structure.
    """

    def evaluate(x):
        t = x[:, 0]
        return np.stack([np.cos(t), np.sin(t)], -1)

    return ImmersionSpec(
        name="complex_circle", k=1, ambient_dim=2, is_complex=True,
        chart_lo=np.array([-math.pi]), chart_hi=np.array([math.pi]), evaluate=evaluate,
        minimal=True, c_totally_real=False, claimed_eigenvalue=1.0,
    )


def _renamed(spec, name):
    return ImmersionSpec(
        name=name, k=spec.k, ambient_dim=spec.ambient_dim, is_complex=spec.is_complex,
        chart_lo=spec.chart_lo, chart_hi=spec.chart_hi, evaluate=spec.evaluate,
        minimal=spec.minimal, c_totally_real=spec.c_totally_real,
        claimed_eigenvalue=spec.claimed_eigenvalue,
    )


def _probe_points(spec, n=64):
    return interior_grid(spec, density=n, cap=n, margin=0.0, seed=1).points


def complexify(src):
    """Place a real sphere-valued immersion in the real parts of C^{N+1}.

    A complex-typed ``src`` is accepted when all of its imaginary parts
    vanish; its values are then returned unchanged.
    """
    if src.is_complex:
        vals = np.asarray(src.evaluate(_probe_points(src)))
        if np.any(vals[:, 1::2] != 0.0):
            raise NotRealValued(f"{src.name} has nonzero imaginary components")

        def evaluate(x):
            v = np.array(src.evaluate(x), dtype=float)
            v[:, 1::2] = 0.0
            return v

        ambient = src.ambient_dim
    else:

        def evaluate(x):
            return _interleave(np.asarray(src.evaluate(x), dtype=float))

        ambient = 2 * src.ambient_dim
    return ImmersionSpec(
        name=f"complexify({src.name})", k=src.k, ambient_dim=ambient, is_complex=True,
        chart_lo=src.chart_lo, chart_hi=src.chart_hi, evaluate=evaluate,
        minimal=src.minimal, c_totally_real=True, claimed_eigenvalue=src.claimed_eigenvalue,
    )


def constant_product(parts, claim_ctr=False):
    """Constant minimal product ``(l_1 f_1, ..., l_n f_n)`` with ``l_i = sqrt(k_i/k)``.

    All ``+`` signs are used. The C-totally real flag is only claimed when
    ``claim_ctr`` is set and every part is C-totally real.
    """
    parts = list(parts)
    if not parts:
        raise EmptyInput("constant_product needs at least one part")
    for p in parts:
        if p.k < 1:
            raise ZeroDimensionalPart(f"{p.name} has dimension {p.k}")
        if not p.minimal:
            raise ValueError(f"{p.name} is not claimed minimal")
    if len({p.is_complex for p in parts}) != 1:
        raise ValueError("cannot mix real- and complex-valued parts; complexify first")
    k = sum(p.k for p in parts)
    scales = [math.sqrt(p.k / k) for p in parts]
    cuts = np.cumsum([0] + [p.k for p in parts])

    def evaluate(x):
        return np.concatenate(
            [lam * np.asarray(p.evaluate(x[:, a:b]), dtype=float)
             for lam, p, a, b in zip(scales, parts, cuts[:-1], cuts[1:])],
            axis=-1,
        )

    return ImmersionSpec(
        name="x".join(p.name for p in parts) if len(parts) > 1 else parts[0].name,
        k=k, ambient_dim=sum(p.ambient_dim for p in parts), is_complex=parts[0].is_complex,
        chart_lo=np.concatenate([p.chart_lo for p in parts]),
        chart_hi=np.concatenate([p.chart_hi for p in parts]),
        evaluate=evaluate, minimal=True,
        c_totally_real=bool(claim_ctr and all(p.c_totally_real for p in parts)),
        claimed_eigenvalue=float(k),
    )


def catalog():
    """The fixed catalog, keyed by CLI name."""
    entries = [
        legendrian_circle(),
        legendrian_torus(),
        real_equator(1),
        real_equator(2),
        real_equator(3),
        complex_circle(),
        _renamed(constant_product([real_equator(1), real_equator(1)]), "clifford_torus"),
    ]
    return {e.name: e for e in entries}


def lookup(name):
    """Resolve a catalog name such as ``legendrian_circle`` or ``real_equator:4``."""
    if name.startswith("real_equator:"):
        return real_equator(int(name.split(":", 1)[1]))
    table = catalog()
    if name not in table:
        raise KeyError(f"unknown immersion {name!r}; choose from {sorted(table)} or real_equator:N")
    return table[name]


def validate_entry(spec, grid_density=10, tol=1e-5, step=numgeo.DEFAULT_STEP,
                   outer_step=numgeo.DEFAULT_OUTER_STEP, cap=500, refine=True):
    """Cross-check a catalog claim against numerical evidence.

    Passes when, on an interior Halton grid, ``|Delta f + lambda f|``,
    ``||f| - 1|`` and (for C-totally real claims) ``|<Jf, d_i f>|`` all stay
    below ``tol``. One Richardson step is applied by default because the
    spherical-angle charts of high-dimensional spheres are strongly curved
    near their edges.
    """
    from .verify import takahashi_residual

    grid = interior_grid(spec, density=grid_density, cap=cap)
    rep = takahashi_residual(spec, spec.claimed_eigenvalue, grid, step=step, outer_step=outer_step, tol=tol,
                             refine=refine)
    vals = np.asarray(spec.evaluate(grid.points))
    sphere = float(np.max(np.abs(np.linalg.norm(vals, axis=-1) - 1.0)))
    ctr = None
    if spec.is_complex:
        ctr = float(np.max(np.abs(numgeo.ctr_residuals(spec, grid.points))))
    ok = rep.residual_max <= tol and sphere <= tol
    if spec.c_totally_real:
        ok = ok and ctr <= tol
    return CatalogReport(
        name=spec.name, takahashi_residual_max=rep.residual_max, eigen_estimate=rep.eigen_estimate,
        ctr_residual_max=ctr, sphere_residual_max=sphere, grid=grid.description, tol=tol,
        passed=bool(ok),
    )
