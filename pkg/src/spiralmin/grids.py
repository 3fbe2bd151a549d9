"""Interior sample grids for verification runs."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

DEFAULT_DENSITY = 10
DEFAULT_CAP = 2000
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class Grid:
    points: np.ndarray
    kind: str
    description: str

    def __len__(self):
        return len(self.points)


def _shrunk_box(lo, hi, margin):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    pad = margin * (hi - lo)
    return lo + pad, hi - pad


def interior_grid(subject, density=DEFAULT_DENSITY, cap=DEFAULT_CAP, kind="halton",
                  margin=DEFAULT_MARGIN, seed=0):
    """Sample points strictly inside ``subject``'s chart box.

    ``kind="halton"`` draws ``min(density**k, cap)`` scrambled Halton points
    (fixed seed, so runs are reproducible); ``kind="tensor"`` places
    ``density`` cell-centred nodes on each axis. The box is first shrunk by
    ``margin`` times its width on every side.
    """
    lo, hi = _shrunk_box(subject.chart_lo, subject.chart_hi, margin)
    k = len(lo)
    if kind == "tensor":
        axes = [lo[i] + (hi[i] - lo[i]) * (np.arange(density) + 0.5) / density for i in range(k)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        desc = f"tensor {'x'.join([str(density)] * k)} (margin {margin:g})"
    elif kind == "halton":
        n = int(min(density**k, cap))
        unit = qmc.Halton(d=k, scramble=True, seed=seed).random(n)
        pts = lo + unit * (hi - lo)
        desc = f"halton n={n} seed={seed} (margin {margin:g})"
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    return Grid(points=pts, kind=kind, description=desc)
