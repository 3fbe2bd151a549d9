import math

import numpy as np
import pytest

from spiralmin import (
    ProfileParams, build, integrate_profile, iterate_products, lookup, pullback_metric,
    real_equator, takahashi_residual, warped_metric,
)
from spiralmin.errors import C1NotMinusOne, DimensionMismatch, InputNotValidated
from spiralmin.grids import interior_grid
from spiralmin.product import c_totally_real_test
from spiralmin.profile import gamma_eval


def test_dimensions_and_claims(prod_minus, prod_plus):
    assert prod_minus.k == 3 and prod_minus.spec.sphere_dim == 7
    assert prod_minus.spec.c_totally_real and not prod_plus.spec.c_totally_real
    assert prod_minus.spec.claimed_eigenvalue == 3.0


def test_unit_norm(prod_minus):
    pts = interior_grid(prod_minus, density=6).points
    assert np.abs(np.linalg.norm(prod_minus.evaluate(pts), axis=1) - 1).max() < 1e-12


def test_constant_slice_at_start(prod_minus, circle):
    # the curve starts at s = pi/4 with zero phases
    x, y = 0.3, -1.2
    G = prod_minus.evaluate(np.array([[0.0, x, y]]))[0]
    f1, f2 = circle(np.array([[x]]))[0], circle(np.array([[y]]))[0]
    assert np.allclose(G, np.concatenate([f1, f2]) / math.sqrt(2), atol=1e-14)


def test_defined_at_joints(prod_minus):
    tj = prod_minus.curve.joints[0]
    assert np.all(np.isfinite(prod_minus.evaluate(np.array([[tj, 0.1, 0.2]]))))


def test_warped_metric_circle_case(prod_minus):
    t = 1.0
    g = gamma_eval(prod_minus.curve, t)
    m = warped_metric(prod_minus, t, [0.2], [0.4]).entries
    assert np.allclose(m, np.diag([1.0, float(g.a) ** 2, float(g.b) ** 2]), atol=1e-10)


def test_warped_metric_determinant(prod_circle_torus):
    t = 0.8
    g = gamma_eval(prod_circle_torus.curve, t)
    ms = warped_metric(prod_circle_torus, t, [0.2], [0.4, -0.5])
    expected = float(g.a) ** 2 * float(g.b) ** 4 * (1 / 3)
    assert ms.det == pytest.approx(expected, rel=1e-8)


def test_warped_metric_matches_pullback(prod_circle_torus):
    pts = interior_grid(prod_circle_torus, density=50, cap=50, seed=4).points
    worst = 0.0
    for p in pts:
        direct = pullback_metric(prod_circle_torus, p).entries
        w = warped_metric(prod_circle_torus, p[0], p[1:2], p[2:]).entries
        worst = max(worst, np.abs(direct - w).max())
    assert worst < 1e-6


def test_ctr_dichotomy(prod_minus, prod_plus, circle):
    assert c_totally_real_test(prod_minus, tol=1e-6)[1]
    res, ok = c_totally_real_test(prod_plus, tol=1e-6)
    assert not ok and res > 1e-2
    res, ok = c_totally_real_test(circle, tol=1e-10)
    assert ok


def test_dimension_mismatch(circle, curve_minus, torus):
    with pytest.raises(DimensionMismatch):
        build(circle, torus, curve_minus)


def test_rejects_non_ctr_inputs(curve_minus):
    with pytest.raises(InputNotValidated):
        build(lookup("complex_circle"), lookup("legendrian_circle"), curve_minus)


def test_rejects_real_valued(curve_minus, circle):
    from spiralmin.catalog import round_sphere
    with pytest.raises(InputNotValidated):
        build(round_sphere(1), circle, curve_minus)


def test_real_equator_inputs(curve_minus):
    prod = build(real_equator(1), real_equator(1), curve_minus)
    assert c_totally_real_test(prod)[1]


def test_iterate_two_equals_build(circle, curve_minus, prod_minus):
    it = iterate_products([circle, circle], [curve_minus])
    pts = interior_grid(prod_minus, density=4).points
    assert np.array_equal(it.evaluate(pts), prod_minus.evaluate(pts))


def test_iterate_guards(circle, curve_plus, curve_minus):
    with pytest.raises(C1NotMinusOne):
        iterate_products([circle, circle], [curve_plus])
    with pytest.raises(DimensionMismatch):
        iterate_products([circle, circle, circle], [curve_minus])


def test_iterate_three_circles(circle, curve_minus):
    c2 = integrate_profile(ProfileParams.auto(3, 1, -1, 1.5), n_joints=1)
    prod = iterate_products([circle, circle, circle], [curve_minus, c2])
    # ambient spaces concatenate: C^4 (first stage) + C^2 = C^6, i.e. S^11
    assert prod.k == 5 and prod.spec.sphere_dim == 11
    rep = takahashi_residual(prod, 5.0, interior_grid(prod, density=3, kind="tensor"))
    assert rep.eigen_estimate == pytest.approx(5.0, abs=1e-3)
