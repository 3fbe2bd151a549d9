import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from spiralmin import _kernels
from spiralmin.errors import EmptyDomain, OutOfSpan, OutsideDomain, SingularDenominator
from spiralmin.profile import (
    ProfileParams, arc_rates, branch_derivatives, c2_min, denom, denom_ds, find_domain,
    gamma_eval, golden_section, half_period, integrate_profile, ratio, steady_c1sq_minus_1,
    steady_profile, theta,
)

Q = math.pi / 4
P32 = ProfileParams(1, 1, 1, 32)


def test_theta_symmetric_point():
    assert theta(Q, P32) == pytest.approx(1.0, rel=1e-15)


def test_theta_with_zero_c1():
    # N = 1/2, C2 P = 2, D = C2 P - N = 3/2
    assert theta(Q, ProfileParams(1, 1, 0, 32)) == pytest.approx(1 / 3, rel=1e-14)


def test_theta_at_double_root_is_outside():
    with pytest.raises(OutsideDomain):
        theta(Q, ProfileParams(1, 1, 1, 16))


def test_denom_values():
    assert denom(Q, P32) == pytest.approx(1.0, rel=1e-14)
    assert denom(1e-6, P32) == pytest.approx(-1.0, abs=1e-9)


def test_theta_matches_eq5_shape():
    # d/ds log Theta computed two ways
    s = np.linspace(0.6, 0.95, 7)
    h = 1e-6
    fd = (np.log(theta(s + h, P32)) - np.log(theta(s - h, P32))) / (2 * h)
    from spiralmin.profile import theta_ds
    assert np.allclose(theta_ds(s, P32) / theta(s, P32), fd, rtol=1e-7)


@pytest.mark.parametrize("C1", [1.0, -1.0])
def test_c2_min_unit_c1(C1):
    v, s = c2_min(1, 1, C1)
    assert v == pytest.approx(16.0, abs=1e-9)
    assert s == pytest.approx(Q, abs=1e-10)


def test_c2_min_zero_c1_against_golden_section():
    v, s = c2_min(1, 1, 0.0)
    s_gs = golden_section(lambda x: ratio(x, 1, 1, 0.0), 0.05, 1.5, tol=1e-12)
    assert s == pytest.approx(s_gs, abs=1e-7)
    assert v == pytest.approx(6.75, abs=1e-12)
    assert s == pytest.approx(math.atan(1 / math.sqrt(2)), abs=1e-12)


@pytest.mark.parametrize("k1,k2,C1", [(2, 1, 1.0), (1, 2, 0.0), (2, 3, -1.0), (1, 1, 2.5)])
def test_c2_min_is_double_root(k1, k2, C1):
    v, s = c2_min(k1, k2, C1)
    p = ProfileParams(k1, k2, C1, v)
    assert abs(denom(s, p)) < 1e-9
    assert abs(denom_ds(s, p)) < 1e-9


def test_c2_min_k2_1_tangency():
    _, s = c2_min(2, 1, 1.0)
    assert s == pytest.approx(math.atan(math.sqrt(2 / 3)), abs=1e-10)


def test_find_domain_brackets_quarter_pi():
    d = find_domain(P32)
    assert d.s_lo < Q < d.s_hi
    assert abs(denom(d.s_lo, P32)) < 1e-12 and abs(denom(d.s_hi, P32)) < 1e-12
    assert d.extra_components == ()


def test_find_domain_empty_below_minimum():
    v, _ = c2_min(1, 1, 1.0)
    with pytest.raises(EmptyDomain):
        find_domain(ProfileParams(1, 1, 1, 0.99 * v))


def test_tiny_domain_near_double_root():
    d = find_domain(ProfileParams(1, 1, 1, 16 + 1e-9))
    assert d.s_lo < Q < d.s_hi
    # quadratic model: D ~ eps/16 - 8 (s - pi/4)^2 near the root
    assert d.width == pytest.approx(2 * math.sqrt(1e-9 / 128), rel=1e-3)


def test_steady_relation_values():
    assert steady_c1sq_minus_1(Q, 2, 2) == pytest.approx(0.0, abs=1e-14)
    assert steady_c1sq_minus_1(math.pi / 3, 1, 1) == pytest.approx(-16.0, rel=1e-12)
    u = steady_c1sq_minus_1(0.8, 1, 1)
    assert u == pytest.approx(0.2637, abs=1e-4)
    assert math.sqrt(1 + u) == pytest.approx(1.124, abs=1e-3)
    with pytest.raises(SingularDenominator):
        steady_c1sq_minus_1(math.atan(math.sqrt(2.0)), 1, 1)


def test_branch_derivatives_symmetric_point():
    d1, d2, dt = branch_derivatives(Q, P32, 1)
    assert (d1, d2) == (pytest.approx(1.0), pytest.approx(1.0))
    assert dt == pytest.approx(math.sqrt(2))
    assert arc_rates(Q, P32)[0] == pytest.approx(1 / math.sqrt(2), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 0.8), st.sampled_from([-1, 1]))
def test_branch_first_integral(frac, sign):
    p = ProfileParams(2, 1, -0.7, 3 * c2_min(2, 1, -0.7)[0])
    d = find_domain(p)
    s = d.s_lo + frac * d.width
    d1, d2, _ = branch_derivatives(s, p, sign)
    assert math.sin(s) ** 2 * d2 == pytest.approx(p.C1 * math.cos(s) ** 2 * d1, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.floats(-3, 3))
def test_nothing_below_c2_min(k1, k2, C1):
    v, _ = c2_min(k1, k2, C1)
    s = np.linspace(1e-3, math.pi / 2 - 1e-3, 2001)
    assert np.all(denom(s, ProfileParams(k1, k2, C1, v * (1 - 1e-6))) < 0)


@pytest.fixture(scope="module")
def curve4():
    return integrate_profile(P32, n_joints=4)


def test_joint_spacing_is_half_period(curve4):
    assert len(curve4.joints) == 4
    assert np.allclose(np.diff(curve4.joints), half_period(P32), atol=1e-9)


def test_s_stays_in_domain(curve4):
    tab = curve4.sample_table()
    d = curve4.domain
    assert tab["s"].min() >= d.s_lo - 1e-10 and tab["s"].max() <= d.s_hi + 1e-10
    assert tab["s"].max() > d.s_hi - 1e-6


def test_first_integral_along_curve(curve4):
    t = np.linspace(curve4.t_start, curve4.t_end, 4001)
    val, d1, _ = _kernels.hermite_eval(curve4.knots, curve4.coef, t)
    a, b = np.cos(val[:, 0]), np.sin(val[:, 0])
    assert np.abs(b**2 * d1[:, 2] - a**2 * d1[:, 1]).max() < 1e-9


def test_arc_length_against_quadrature():
    c = integrate_profile(P32, t_max=0.4)
    assert not c.joints
    s0 = float(gamma_eval(c, 0.0).s)
    s1 = float(gamma_eval(c, 0.4).s)
    t, _ = integrate.quad(lambda s: math.sqrt(1 + theta(s, P32)), s0, s1, epsabs=1e-13)
    assert t == pytest.approx(0.4, abs=1e-8)


def test_unit_sphere_and_unit_speed(curve4):
    t = np.random.default_rng(1).uniform(curve4.t_start, curve4.t_end, 100)
    g = gamma_eval(curve4, t)
    assert np.abs(np.abs(g.gamma1) ** 2 + np.abs(g.gamma2) ** 2 - 1).max() < 1e-12
    assert np.abs(np.abs(g.dgamma1) ** 2 + np.abs(g.dgamma2) ** 2 - 1).max() < 1e-9
    h = 1e-5
    tt = np.clip(t, curve4.t_start + h, curve4.t_end - h)
    gp, gm = gamma_eval(curve4, tt + h), gamma_eval(curve4, tt - h)
    fd = np.sqrt(np.abs((gp.gamma1 - gm.gamma1) / (2 * h)) ** 2 + np.abs((gp.gamma2 - gm.gamma2) / (2 * h)) ** 2)
    assert np.abs(fd - 1).max() < 1e-8


def test_basic_relations(curve4):
    t = np.linspace(0.05, curve4.joints[0] - 0.05, 50)
    g = gamma_eval(curve4, t)
    root = np.sqrt(1 + theta(g.s, P32))
    assert np.abs(g.da + g.b / root).max() < 1e-9
    assert np.abs(g.db - g.a / root).max() < 1e-9


def test_branch_sign_flips_at_joints(curve4):
    for tj in curve4.joints:
        left, right = curve4.branch_sign_at([tj - 1e-6, tj + 1e-6])
        assert left == -right


def test_out_of_span(curve4):
    with pytest.raises(OutOfSpan):
        gamma_eval(curve4, curve4.t_end + 1e-3)


def test_minus_branch_start():
    c = integrate_profile(P32, n_joints=1, sign=-1)
    assert gamma_eval(c, 0.01).ds < 0


def test_outside_start_rejected():
    with pytest.raises(OutsideDomain):
        integrate_profile(P32, s_start=0.2)


def test_steady_profile():
    c = steady_profile(1, 1, -1)
    g = gamma_eval(c, np.linspace(0, 6, 13))
    assert np.allclose(g.s, Q, atol=1e-12)
    assert np.allclose(g.ds1, 1.0, atol=1e-12)
    assert np.allclose(g.ds2, -1.0, atol=1e-12)
    assert c.domain.width == 0.0


def test_limit_to_steady():
    v, s_star = c2_min(1, 2, 0.0)
    widths = []
    for j in range(1, 7):
        d = find_domain(ProfileParams(1, 2, 0.0, v * (1 + 4.0**-j)))
        assert abs(d.midpoint - s_star) <= 0.5 * d.width
        widths.append(d.width)
    assert all(w1 > w2 for w1, w2 in zip(widths, widths[1:]))
