import math

import numpy as np
import pytest

from spiralmin import (
    ImmersionSpec, catalog, complexify, constant_product, legendrian_circle, legendrian_torus,
    lookup, pullback_metric, real_equator, round_sphere, takahashi_residual, validate_entry,
)
from spiralmin.errors import EmptyInput, NotRealValued, ZeroDimensionalPart
from spiralmin.grids import interior_grid
from spiralmin.numgeo import ctr_residuals


def test_catalog_names():
    names = set(catalog())
    assert {"legendrian_circle", "legendrian_torus", "real_equator:2", "clifford_torus"} <= names
    assert lookup("real_equator:4").k == 4
    with pytest.raises(KeyError):
        lookup("no_such_thing")


@pytest.mark.parametrize("name", sorted(catalog()))
def test_every_entry_validates(name):
    rep = validate_entry(lookup(name))
    assert rep.passed, rep
    assert rep.eigen_estimate == pytest.approx(lookup(name).claimed_eigenvalue, abs=1e-6)


def test_legendrian_circle_values():
    c = legendrian_circle()
    t = np.array([[0.0], [0.9], [2.0]])
    vals = c(t)
    assert np.allclose(np.linalg.norm(vals, axis=1), 1.0, atol=1e-15)
    assert np.abs(ctr_residuals(c, t[:2])).max() < 1e-12
    h = 1e-4
    second = (c(t + h) - 2 * vals + c(t - h)) / h**2
    assert np.allclose(second, -vals, atol=1e-6)


def test_legendrian_torus_metric():
    g = pullback_metric(legendrian_torus(), [0.3, -1.2]).entries
    assert np.allclose(g, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-8)


def test_legendrian_torus_ctr():
    pts = interior_grid(legendrian_torus(), density=5).points
    assert np.abs(ctr_residuals(legendrian_torus(), pts)).max() < 1e-12


def test_real_equator_exactly_totally_real():
    for n in (1, 2, 3):
        e = real_equator(n)
        pts = interior_grid(e, density=4).points
        assert np.all(ctr_residuals(e, pts) == 0.0)
        assert e.c_totally_real and e.sphere_dim == 2 * n + 1


def test_real_equator_one_is_great_circle():
    rep = takahashi_residual(real_equator(1), 1.0, interior_grid(real_equator(1)), tol=1e-6)
    assert rep.passed


def test_complexify_preserves_metric():
    s, c = round_sphere(2), complexify(round_sphere(2))
    p = [1.0, 0.4]
    assert np.array_equal(pullback_metric(s, p).entries, pullback_metric(c, p).entries)


def test_complexify_rejects_complex_values():
    with pytest.raises(NotRealValued):
        complexify(legendrian_circle())


def test_complexify_accepts_real_valued_complex_spec():
    c = complexify(real_equator(2))
    p = np.array([[1.0, 0.5]])
    assert np.array_equal(c(p), real_equator(2)(p))


def test_constant_product_guards():
    with pytest.raises(EmptyInput):
        constant_product([])
    z = ImmersionSpec("pt", 0, 2, True, np.zeros(0), np.zeros(0), lambda x: np.ones((len(x), 2)))
    with pytest.raises(ZeroDimensionalPart):
        constant_product([z])
    with pytest.raises(ValueError):
        constant_product([round_sphere(1), real_equator(1)])


def test_constant_product_single_is_identity():
    e = real_equator(2)
    p = np.array([[1.0, 0.5]])
    assert np.array_equal(constant_product([e])(p), e(p))


def test_clifford_scales():
    t = constant_product([real_equator(1), real_equator(1)])
    v = t(np.array([[0.3, 1.1]]))
    assert np.linalg.norm(v[0, :4]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_circle_times_sphere():
    p = constant_product([real_equator(1), real_equator(2)])
    v = p(np.array([[0.3, 1.0, 0.2]]))
    assert np.linalg.norm(v[0, :4]) == pytest.approx(math.sqrt(1 / 3), abs=1e-15)
    rep = takahashi_residual(p, 3.0, interior_grid(p, density=6))
    assert rep.eigen_estimate == pytest.approx(3.0, abs=1e-4)


def test_scaled_map_fails_validation():
    c = legendrian_circle()
    bad = ImmersionSpec("shrunk", 1, 4, True, c.chart_lo, c.chart_hi, lambda x: 0.9 * c(x),
                        c_totally_real=True, claimed_eigenvalue=1.0)
    rep = validate_entry(bad)
    assert not rep.passed
    assert rep.sphere_residual_max == pytest.approx(0.1, abs=1e-12)


def test_complex_circle_is_not_totally_real():
    rep = validate_entry(lookup("complex_circle"))
    assert rep.ctr_residual_max == pytest.approx(1.0, abs=1e-8)
