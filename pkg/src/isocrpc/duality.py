"""Point/plane duality for the degenerate metric and its curvature laws.

A point (p1, p2, p3) corresponds to the non-vertical plane
z = p1 x + p2 y - p3 and back again; the correspondence is an involution.
Distances between points (top-view distance) equal angles between the
dual planes. Applied pointwise to an admissible surface the map produces
the dual surface, whose curvatures satisfy K* = 1/K and H* = H/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonAdmissiblePoint
from .families import FamilySpec, evaluate
from .geometry import (
    Jet2Height,
    ParamJet2,
    height_jet_from_param,
    isotropic_curvatures,
)


@dataclass(frozen=True)
class NonIsoPlane:
    """Non-vertical plane z = p1 x + p2 y - p3."""

    p1: float
    p2: float
    p3: float

    def height(self, x, y):
        return self.p1 * np.asarray(x, float) + self.p2 * np.asarray(y, float) - self.p3


def dual_point(point) -> NonIsoPlane:
    """Plane dual to a point."""
    p = np.asarray(point, float).reshape(3)
    return NonIsoPlane(float(p[0]), float(p[1]), float(p[2]))


def dual_plane(plane: NonIsoPlane) -> np.ndarray:
    """Point dual to a plane (exact inverse of dual_point)."""
    return np.array([plane.p1, plane.p2, plane.p3])


def isotropic_distance(p, q) -> float:
    """Distance in the degenerate metric: top-view Euclidean distance."""
    p = np.asarray(p, float).reshape(3)
    q = np.asarray(q, float).reshape(3)
    return math.hypot(p[0] - q[0], p[1] - q[1])


def isotropic_angle(e1: NonIsoPlane, e2: NonIsoPlane) -> float:
    """Angle between two non-vertical planes; equals the dual points' distance."""
    return math.hypot(e1.p1 - e2.p1, e1.p2 - e2.p2)


def dual_from_tangent(r, ru, rv) -> np.ndarray:
    """Dual surface point from first derivatives of a parameterization.

    The tangent plane at r is z = a x + b y + c with (a, b) solving the
    two-by-two top-view system; the dual point is (a, b, -c).
    """
    r = np.asarray(r, float).reshape(3)
    ru = np.asarray(ru, float).reshape(3)
    rv = np.asarray(rv, float).reshape(3)
    det = ru[0] * rv[1] - ru[1] * rv[0]
    if abs(det) < 1e-14 * max(1.0, np.linalg.norm(ru) * np.linalg.norm(rv)):
        raise NonAdmissiblePoint("tangent plane is vertical; dual point undefined")
    a = (ru[2] * rv[1] - rv[2] * ru[1]) / det
    b = (ru[0] * rv[2] - rv[0] * ru[2]) / det
    c = r[2] - a * r[0] - b * r[1]
    return np.array([a, b, -c])


def dual_surface_point(jet) -> np.ndarray:
    """Dual point of a surface jet (ParamJet2 or Jet2Height)."""
    if isinstance(jet, Jet2Height):
        fx, fy = jet.fx, jet.fy
        return np.array([fx, fy, jet.x0 * fx + jet.y0 * fy - jet.f])
    j: ParamJet2 = jet
    return dual_from_tangent(j.r, j.ru, j.rv)


def dual_velocity(jet: ParamJet2) -> tuple[np.ndarray, np.ndarray]:
    """Exact chart derivatives of the dual map from the primal 2-jet.

    With D = (fx, fy, x fx + y fy - f), the height gradient's chain rule
    cancels the -f term, so D_u = (A, B, x A + y B) where (A, B) is the
    Hessian applied to the top view of r_u; same for D_v. Needs no third
    derivatives of the primal surface.
    """
    hj = height_jet_from_param(jet)
    xu, yu = jet.ru[..., 0], jet.ru[..., 1]
    xv, yv = jet.rv[..., 0], jet.rv[..., 1]
    au = hj.fxx * xu + hj.fxy * yu
    bu = hj.fxy * xu + hj.fyy * yu
    av = hj.fxx * xv + hj.fxy * yv
    bv = hj.fxy * xv + hj.fyy * yv
    du = np.stack([au, bu, hj.x0 * au + hj.y0 * bu], axis=-1)
    dv = np.stack([av, bv, hj.x0 * av + hj.y0 * bv], axis=-1)
    return du, dv


def dual_map_jet(
    jet_fn: Callable[[float, float], ParamJet2],
    u: float,
    v: float,
    h: float = 1e-4,
) -> ParamJet2:
    """2-jet of the dual surface by finite differences of the dual map.

    The dual point and its first chart derivatives are exact (primal 2-jet
    data only); the dual's second derivatives come from fourth-order
    stencils of those exact first derivatives at step h. This keeps the
    check independent of primal third derivatives while avoiding the
    cancellation that direct second differences of large dual coordinates
    would suffer.
    """
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    vel_u = [dual_velocity(jet_fn(u + (i - 2) * h, v)) for i in range(5)]
    vel_v = [dual_velocity(jet_fn(u, v + (k - 2) * h)) for k in range(5)]
    center = jet_fn(u, v)
    r = dual_surface_point(center)
    ru, rv = dual_velocity(center)
    ruu = sum(w * d[0] for w, d in zip(w1, vel_u))
    rvv = sum(w * d[1] for w, d in zip(w1, vel_v))
    ruv = 0.5 * (sum(w * d[1] for w, d in zip(w1, vel_u))
                 + sum(w * d[0] for w, d in zip(w1, vel_v)))
    return ParamJet2(r=r, ru=ru, rv=rv, ruu=ruu, ruv=ruv, rvv=rvv)


def dual_curvature_check(
    spec: FamilySpec,
    us: np.ndarray,
    vs: np.ndarray,
    h: float = 1e-4,
    k_floor: float = 1e-6,
) -> tuple[float, float]:
    """Max deviations of (K* K - 1, H* - H/K) over a parameter grid.

    Dual curvatures come from finite-difference jets of the exact dual
    points. Grid nodes where the primal surface is too flat (|K| below
    k_floor, where 1/K is numerically meaningless) are skipped.
    """
    def jet_fn(uu: float, vv: float) -> ParamJet2:
        return evaluate(spec, uu, vv, check=False)

    worst_k = 0.0
    worst_h = 0.0
    used = 0
    for u in np.asarray(us, float).ravel():
        for v in np.asarray(vs, float).ravel():
            cur = isotropic_curvatures(height_jet_from_param(jet_fn(u, v)))
            K = float(cur.K)
            H = float(cur.H)
            if abs(K) < k_floor:
                continue
            dj = dual_map_jet(jet_fn, u, v, h=h)
            dcur = isotropic_curvatures(height_jet_from_param(dj))
            worst_k = max(worst_k, abs(float(dcur.K) * K - 1.0))
            worst_h = max(worst_h, abs(float(dcur.H) - H / K))
            used += 1
    if used == 0:
        raise NonAdmissiblePoint("no grid node had usable curvature for the dual check")
    return worst_k, worst_h


def involution_check(
    spec: FamilySpec,
    us: np.ndarray,
    vs: np.ndarray,
    h: float = 1e-4,
) -> float:
    """Max |dual(dual(r)) - r| over a grid, with the second dual via fd tangents."""
    worst = 0.0
    for u in np.asarray(us, float).ravel():
        for v in np.asarray(vs, float).ravel():
            def D(uu: float, vv: float) -> np.ndarray:
                return dual_surface_point(evaluate(spec, uu, vv, check=False))

            r0 = np.asarray(evaluate(spec, u, v, check=False).r, float).reshape(3)
            d0 = D(u, v)
            du = (D(u + h, v) - D(u - h, v)) / (2 * h)
            dv = (D(u, v + h) - D(u, v - h)) / (2 * h)
            back = dual_from_tangent(d0, du, dv)
            worst = max(worst, float(np.max(np.abs(back - r0))))
    return worst


def line_fit_residual(points: np.ndarray) -> float:
    """Max distance of planar points from their total-least-squares line."""
    P = np.asarray(points, float)
    c = P.mean(axis=0)
    Q = P - c
    _, _, vt = np.linalg.svd(Q, full_matrices=False)
    n = vt[-1]  # unit normal of the best line
    return float(np.max(np.abs(Q @ n)))


def conjugate_geodesic_net_check(
    spec: FamilySpec,
    us: np.ndarray,
    vs: np.ndarray,
) -> tuple[float, float]:
    """(line residual, conjugacy residual) of the parameter net.

    The net is by straight lines in the top view when every u- and
    v-isoline projects onto a line (first value: worst line-fit
    deviation), and conjugate when the mixed second fundamental form
    vanishes in net directions (second value: worst |cu^T Hess cv| with
    unit top-view net tangents).
    """
    us = np.asarray(us, float).ravel()
    vs = np.asarray(vs, float).ravel()
    worst_line = 0.0
    for u in us:
        pts = np.stack([evaluate(spec, u, v, check=False).r[:2] for v in vs])
        worst_line = max(worst_line, line_fit_residual(pts))
    for v in vs:
        pts = np.stack([evaluate(spec, u, v, check=False).r[:2] for u in us])
        worst_line = max(worst_line, line_fit_residual(pts))

    worst_conj = 0.0
    for u in us:
        for v in vs:
            jet = evaluate(spec, u, v, check=False)
            hj = height_jet_from_param(jet)
            hess = np.array([[hj.fxx, hj.fxy], [hj.fxy, hj.fyy]])
            cu = np.asarray(jet.ru[:2], float)
            cv = np.asarray(jet.rv[:2], float)
            cu = cu / np.linalg.norm(cu)
            cv = cv / np.linalg.norm(cv)
            worst_conj = max(worst_conj, abs(float(cu @ hess @ cv)))
    return worst_line, worst_conj
