"""Core jet and curvature machinery.

Frozen oracle values are written out as literals; each was computed
independently (by hand from the chart formulas, or from a finite
difference path that does not share code with the analytic one).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from isocrpc.errors import (
    DegenerateK,
    NonAdmissiblePoint,
    SingularSimilarity,
    StencilOutOfDomain,
    Umbilic,
)
from isocrpc.families import G8Element, apply_similarity, evaluate, make_spec
from isocrpc.geometry import (
    Jet2Height,
    ParamJet2,
    characteristic_directions,
    crpc_residual,
    crpc_target,
    euclidean_curvatures,
    fd_jet,
    height_jet_from_param,
    isotropic_curvatures,
    isotropic_norm,
    normal_curvature,
    point3,
    unit_topdir,
)

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def monge_jet(x, y, f, fx, fy, fxx, fxy, fyy):
    return Jet2Height(x0=x, y0=y, f=f, fx=fx, fy=fy, fxx=fxx, fxy=fxy, fyy=fyy)


def test_point3_and_norm():
    p = point3(3.0, 4.0, 7.0)
    assert p.shape == (3,)
    assert isotropic_norm(p) == 5.0
    assert_allclose(unit_topdir(3.0, 4.0), [0.6, 0.8])


def test_jet2height_point_property():
    j = monge_jet(1.0, 2.0, 5.0, 0, 0, 0, 0, 0)
    assert_allclose(j.point, [1.0, 2.0, 5.0])


# --- finite-difference oracle -------------------------------------------

def test_fd_jet_matches_analytic_trig_surface():
    def f(x, y):
        return math.sin(x) * math.cos(y)

    x, y = 0.3, 0.7
    j = fd_jet(f, x, y)
    sx, cy = math.sin(x), math.cos(y)
    cx, sy = math.cos(x), math.sin(y)
    assert_allclose(j.f, sx * cy, rtol=1e-12)
    assert_allclose(j.fx, cx * cy, rtol=1e-7)
    assert_allclose(j.fy, -sx * sy, rtol=1e-7)
    assert_allclose(j.fxx, -sx * cy, rtol=1e-6)
    assert_allclose(j.fxy, -cx * sy, rtol=1e-6)
    assert_allclose(j.fyy, -sx * cy, rtol=1e-6)


def test_fd_jet_guards():
    with pytest.raises(ValueError):
        fd_jet(lambda x, y: 0.0, 0.0, 0.0, h=0.0)
    with pytest.raises(StencilOutOfDomain):
        fd_jet(lambda x, y: math.sqrt(x), 0.0, 0.0)  # stencil leaves the domain
    with pytest.raises(StencilOutOfDomain):
        fd_jet(lambda x, y: float("nan"), 0.0, 0.0)


def test_height_jet_from_polar_chart_matches_monge_form():
    # paraboloid z = x^2 + y^2 written in polar coordinates
    u, v = 1.3, 0.8
    c, s = math.cos(v), math.sin(v)
    jet = ParamJet2(
        r=np.array([u * c, u * s, u * u]),
        ru=np.array([c, s, 2 * u]),
        rv=np.array([-u * s, u * c, 0.0]),
        ruu=np.array([0.0, 0.0, 2.0]),
        ruv=np.array([-s, c, 0.0]),
        rvv=np.array([-u * c, -u * s, 0.0]),
    )
    hj = height_jet_from_param(jet)
    assert_allclose([hj.fx, hj.fy], [2 * u * c, 2 * u * s], atol=1e-13)
    assert_allclose([hj.fxx, hj.fxy, hj.fyy], [2.0, 0.0, 2.0], atol=1e-13)


def test_height_jet_rejects_vertical_tangent():
    jet = ParamJet2(
        r=np.zeros(3),
        ru=np.array([1.0, 0.0, 0.0]),
        rv=np.array([2.0, 0.0, 1.0]),  # top views collinear
        ruu=np.zeros(3), ruv=np.zeros(3), rvv=np.zeros(3),
    )
    with pytest.raises(NonAdmissiblePoint):
        height_jet_from_param(jet)


# --- isotropic curvature values ------------------------------------------

def test_helicoid_curvatures_at_unit_radius():
    jet = evaluate(make_spec("helicoid"), 1.0, 0.0)
    c = isotropic_curvatures(height_jet_from_param(jet))
    assert_allclose(c.H, 0.0, atol=1e-14)
    assert_allclose(c.K, -1.0, rtol=1e-13)
    assert_allclose([c.k1, c.k2], [1.0, -1.0], rtol=1e-13)
    assert not bool(c.umbilic)


def test_logarithmoid_hessian_on_x_axis():
    # z = 2 log r: at (1, 0) the Hessian is diag(-2, 2)
    jet = evaluate(make_spec("logarithmoid"), 1.0, 0.0)
    hj = height_jet_from_param(jet)
    assert_allclose([hj.fxx, hj.fxy, hj.fyy], [-2.0, 0.0, 2.0], atol=1e-13)
    c = isotropic_curvatures(hj)
    assert_allclose(c.H, 0.0, atol=1e-14)
    assert_allclose(c.K, -4.0, rtol=1e-13)


def test_trans_paraboloid_constant_curvatures():
    jet = evaluate(make_spec("trans_paraboloid", {"a": 2.0}), 0.37, -0.81)
    c = isotropic_curvatures(height_jet_from_param(jet))
    assert_allclose(c.K, 8.0, rtol=1e-12)
    assert_allclose(c.H, 3.0, rtol=1e-12)


def test_umbilic_flag_and_direction_fallback():
    c = isotropic_curvatures(monge_jet(0, 0, 0, 0, 0, 2.0, 0.0, 2.0))
    assert bool(c.umbilic)
    assert_allclose(c.d1, [1.0, 0.0])
    assert_allclose(c.d2, [0.0, 1.0])


def test_principal_directions_are_orthonormal_eigenvectors():
    j = monge_jet(0, 0, 0, 0, 0, 3.0, 1.0, -2.0)
    c = isotropic_curvatures(j)
    hess = np.array([[3.0, 1.0], [1.0, -2.0]])
    assert_allclose(np.dot(c.d1, c.d2), 0.0, atol=1e-15)
    assert_allclose(hess @ c.d1, float(c.k1) * c.d1, atol=1e-12)
    assert_allclose(hess @ c.d2, float(c.k2) * c.d2, atol=1e-12)
    assert float(c.k1) >= float(c.k2)


@given(fxx=finite, fxy=finite, fyy=finite)
@settings(max_examples=150, deadline=None)
def test_eigen_reconstruction_property(fxx, fxy, fyy):
    c = isotropic_curvatures(monge_jet(0, 0, 0, 0, 0, fxx, fxy, fyy))
    hess = np.array([[fxx, fxy], [fxy, fyy]])
    scale = max(1.0, abs(fxx), abs(fxy), abs(fyy))
    assert abs(float(c.k1) + float(c.k2) - (fxx + fyy)) <= 1e-12 * scale
    assert abs(float(c.k1) * float(c.k2) - (fxx * fyy - fxy * fxy)) <= 1e-11 * scale ** 2
    if not bool(c.umbilic):
        assert np.max(np.abs(hess @ c.d1 - float(c.k1) * c.d1)) <= 1e-10 * scale


# --- ratio condition -------------------------------------------------------

def test_crpc_target_values_and_symmetry():
    assert crpc_target(2.0) == pytest.approx(9.0 / 8.0)
    assert crpc_target(1.0) == 1.0
    assert crpc_target(-1.0) == 0.0
    assert crpc_target(0.5) == crpc_target(2.0)
    with pytest.raises(ValueError):
        crpc_target(0.0)


def test_crpc_residual_vanishes_on_the_quadric():
    jet = evaluate(make_spec("trans_paraboloid", {"a": 2.0}), 0.1, 0.4)
    assert abs(float(crpc_residual(height_jet_from_param(jet), 2.0))) < 1e-14
    # the symmetric hypothesis a -> 1/a leaves the target unchanged
    assert abs(float(crpc_residual(height_jet_from_param(jet), 0.5))) < 1e-14


def test_crpc_residual_degenerate_k():
    with pytest.raises(DegenerateK):
        crpc_residual(monge_jet(0, 0, 0, 0, 0, 1.0, 0.0, 0.0), 2.0)


def test_normal_curvature_euler_values():
    j = monge_jet(0, 0, 0, 0, 0, 2.0, 0.0, 4.0)
    assert normal_curvature(j, (1.0, 0.0)) == pytest.approx(2.0)
    assert normal_curvature(j, (0.0, 1.0)) == pytest.approx(4.0)
    t = unit_topdir(1.0, 1.0)
    assert normal_curvature(j, t) == pytest.approx(3.0)


# --- characteristic directions ---------------------------------------------

def test_characteristic_directions_asymptotic_when_k_negative():
    jet = evaluate(make_spec("helicoid"), 1.2, 0.3)
    hj = height_jet_from_param(jet)
    tp, tm = characteristic_directions(hj)
    assert abs(float(normal_curvature(hj, tp))) < 1e-12
    assert abs(float(normal_curvature(hj, tm))) < 1e-12


def test_characteristic_angle_law_positive_k():
    a = 2.0
    jet = evaluate(make_spec("paraboloid", {"a": a}), 0.2, 0.5)
    tp, tm = characteristic_directions(height_jet_from_param(jet))
    gamma = math.acos(abs(float(np.dot(tp, tm))))
    assert 1.0 / math.tan(gamma / 2.0) ** 2 == pytest.approx(a, abs=1e-12)


def test_characteristic_directions_raise_at_umbilic():
    with pytest.raises(Umbilic):
        characteristic_directions(monge_jet(0, 0, 0, 0, 0, 2.0, 0.0, 2.0))
    with pytest.raises(DegenerateK):
        characteristic_directions(monge_jet(0, 0, 0, 0, 0, 1.0, 0.0, 0.0))


# --- Euclidean pipeline ------------------------------------------------------

def test_euclidean_curvatures_on_round_sphere():
    x, y = 0.1, 0.2

    def upper(xx, yy):
        return math.sqrt(1.0 - xx * xx - yy * yy)

    r2 = x * x + y * y
    w = upper(x, y)
    j = monge_jet(
        x, y, w,
        -x / w, -y / w,
        -(1.0 - y * y) / w ** 3, -x * y / w ** 3, -(1.0 - x * x) / w ** 3,
    )
    K_e, H_e, k1_e, k2_e = euclidean_curvatures(j)
    assert_allclose(K_e, 1.0, rtol=1e-12)
    assert_allclose(abs(float(H_e)), 1.0, rtol=1e-12)
    assert_allclose([abs(float(k1_e)), abs(float(k2_e))], [1.0, 1.0], rtol=1e-12)
    assert r2 < 1.0  # the chart point really is on the upper hemisphere


def test_helicoid_is_euclidean_minimal_too():
    jet = evaluate(make_spec("helicoid"), 0.9, 1.1)
    _, H_e, _, _ = euclidean_curvatures(height_jet_from_param(jet))
    assert abs(float(H_e)) < 1e-13


# --- similarity invariance ---------------------------------------------------

@given(
    h1=st.floats(min_value=0.2, max_value=2.0),
    h2=st.floats(min_value=-1.0, max_value=1.0),
    c1=finite, c2=finite,
    c3=st.floats(min_value=0.3, max_value=3.0),
    u=st.floats(min_value=-0.8, max_value=0.8),
    v=st.floats(min_value=-0.8, max_value=0.8),
)
@settings(max_examples=100, deadline=None)
def test_similarity_scaling_law_and_ratio_invariance(h1, h2, c1, c2, c3, u, v):
    g = G8Element(h1=h1, h2=h2, c1=c1, c2=c2, c3=c3, b=(0.4, -0.2, 1.5))
    jet = evaluate(make_spec("paraboloid", {"a": 2.0}), u, v)
    c_before = isotropic_curvatures(height_jet_from_param(jet))
    c_after = isotropic_curvatures(height_jet_from_param(apply_similarity(g, jet)))
    sigma2 = h1 * h1 + h2 * h2
    fac = c3 / sigma2
    assert_allclose(float(c_after.H), fac * float(c_before.H), rtol=1e-10, atol=1e-12)
    assert_allclose(float(c_after.K), fac * fac * float(c_before.K), rtol=1e-10, atol=1e-12)
    before = float(c_before.H) ** 2 / float(c_before.K)
    after = float(c_after.H) ** 2 / float(c_after.K)
    assert abs(before - after) <= 1e-12 * max(1.0, abs(before))


def test_singular_similarity_rejected():
    jet = evaluate(make_spec("paraboloid", {"a": 2.0}), 0.1, 0.1)
    with pytest.raises(SingularSimilarity):
        apply_similarity(G8Element(c3=0.0), jet)
