import math

import numpy as np
import pytest

from spiralmin import ProfileParams, constant_product, real_equator
from spiralmin.errors import NoSteadyAngle, OutsideDomain
from spiralmin.grids import interior_grid
from spiralmin.verify import (
    IdentityTerms, identity_suite, split_laplacian_check, steady_check, takahashi_residual,
)


def test_clifford_residual():
    t = constant_product([real_equator(1), real_equator(1)])
    rep = takahashi_residual(t, 2.0, tol=1e-5)
    assert rep.passed and rep.residual_max < 1e-5


def test_spiral_residual_and_wrong_lambda(prod_minus):
    g = interior_grid(prod_minus, density=6)
    good = takahashi_residual(prod_minus, 3.0, g)
    assert good.passed and good.residual_max < 1e-4
    assert good.residual_max >= good.residual_mean >= 0
    bad = takahashi_residual(prod_minus, 2.5, g)
    assert not bad.passed and bad.residual_max > 0.1


def test_report_json_excludes_runtime(prod_minus):
    rep = takahashi_residual(prod_minus, 3.0, interior_grid(prod_minus, density=3))
    assert "runtime_seconds" not in rep.to_json()
    assert rep.to_json(include_runtime=True)["runtime_seconds"] >= 0


def test_identities_gate_the_verdict(prod_minus):
    g = interior_grid(prod_minus, density=3)
    rep = takahashi_residual(prod_minus, 3.0, g, identities={"x": 1e-3})
    assert not rep.passed


def test_split_matches_direct(prod_minus):
    pts = interior_grid(prod_minus, density=20, cap=20, seed=2).points
    assert split_laplacian_check(prod_minus, pts)[2] < 1e-5
    direct, split, diff = split_laplacian_check(prod_minus, pts[0])
    assert direct.shape == split.shape == (8,) and diff < 1e-5


def test_split_on_steady_curve(prod_steady):
    pts = interior_grid(prod_steady, density=10, cap=10).points
    assert split_laplacian_check(prod_steady, pts)[2] < 1e-5


def test_split_sensitive_to_eigenvalue(prod_minus):
    pts = interior_grid(prod_minus, density=5, cap=5).points
    assert split_laplacian_check(prod_minus, pts, eigen_override=(2.0, 1.0))[2] > 1e-2


def test_identity_suite_examples():
    rep = identity_suite(ProfileParams(1, 1, 1, 32))
    assert max(rep.residuals.values()) < 1e-9
    assert np.abs(rep.terms.re_part + 3).max() < 1e-9
    rep = identity_suite(ProfileParams.auto(2, 3, -1, 10))
    assert rep.passed


@pytest.mark.parametrize("C1", [-1.0, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("mult", [1.05, 1.5, 10.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_identity_matrix(C1, mult, sign):
    rep = identity_suite(ProfileParams.auto(1, 2, C1, mult), n_points=300, sign=sign)
    assert rep.passed, rep.residuals


def test_identity_terms_decomposition():
    t = identity_suite(ProfileParams.auto(1, 1, 0.5, 2.0)).terms
    assert np.abs(t.X - (t.II + t.III)).max() < 1e-10
    assert list(t.columns()) == list(IdentityTerms.COLUMNS)


def test_identity_suite_off_domain():
    with pytest.raises(OutsideDomain):
        identity_suite(ProfileParams(1, 1, 1, 32), s_grid=[0.1])


def test_steady_unit_c1():
    rep = steady_check(1, 1, C1=-1.0)
    assert rep.s == pytest.approx(math.pi / 4, abs=1e-10)
    assert rep.C2 == pytest.approx(16.0, abs=1e-9)
    assert rep.s1p_sq == pytest.approx(1.0, abs=1e-9)
    assert rep.passed


def test_steady_generic_angle():
    rep = steady_check(1, 1, s=0.8)
    assert rep.C1 == pytest.approx(1.124, abs=1e-3)
    assert rep.s1p_sq == pytest.approx(-math.tan(0.8) ** 2 + 2, abs=1e-9)
    again = steady_check(1, 1, C1=rep.C1)
    assert again.s == pytest.approx(0.8, abs=1e-10)


def test_steady_unrealizable():
    with pytest.raises(NoSteadyAngle):
        steady_check(1, 1, s=math.pi / 3)


def test_steady_c2_is_minimum():
    for C1 in (0.0, 0.5, 2.0):
        rep = steady_check(2, 1, C1=C1)
        assert rep.C2 == pytest.approx(rep.c2_min, rel=1e-12)
        assert rep.passed
