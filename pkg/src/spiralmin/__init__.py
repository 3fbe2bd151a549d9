"""Spiral minimal products of C-totally real minimal immersions into spheres.

The building blocks, bottom-up: :mod:`numgeo` (finite-difference jets,
induced metrics, Laplace-Beltrami), :mod:`catalog` (concrete minimal
immersions), :mod:`profile` (the profile curve in S^3), :mod:`product`
(spiral products) and :mod:`verify` (Takahashi residuals and the
closed-form identity suite).
"""

from ._accel import NUMBA_ENABLED, backend_name
from .catalog import (
    ImmersionSpec, catalog, complexify, constant_product, legendrian_circle, legendrian_torus,
    lookup, real_equator, round_sphere, validate_entry,
)
from .errors import *  # noqa: F401,F403
from .grids import Grid, interior_grid
from .numgeo import (
    ChartMap, complex_structure, ctr_residuals, fd_jet, laplace_beltrami, laplace_beltrami_batch,
    pullback_metric,
)
from .product import SpiralProduct, build, c_totally_real_test, iterate_products, warped_metric
from .profile import (
    DomainJ, ProfileCurve, ProfileParams, c2_min, denom, find_domain, gamma_eval, half_period,
    integrate_profile, steady_profile, theta,
)
from .verify import (
    VerificationReport, identity_suite, split_laplacian_check, steady_check, takahashi_residual,
)

__version__ = "0.1.0"
