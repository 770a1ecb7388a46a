"""Catalog of exact surface families with constant principal-curvature ratio.

Every family is a parametric chart r(u, v) with hand-written first and
second partial derivatives (no automatic differentiation anywhere); the
finite-difference oracle in the test suite cross-checks each one. Charts
are vectorized over numpy arrays.

Family ids and their curvature ratio:

======================  =====================================================
paraboloid              z = x^2 + a y^2, ratio a (any a != 0)
rotational_power_1      z = r^(1+a), ratio a (a not in {0, -1})
rotational_power_2      z = r^((1+a)/a), ratio 1/a form of the same law
logarithmoid            z = log(x^2 + y^2), the rotational minimal case
euclidean_rotational    Euclidean ratio a rotational surface (comparison)
helicoid                (u cos v, u sin v, v), isotropic minimal
spiral_ruled            ruled spiral surface, ratio a < 0, a != -1
helical_general         helical surface of pitch 1, ratio a not in {0,+-1}
helical_log             (u cos v, u sin v, c log u + v), isotropic minimal
trans_paraboloid        (u, v, v^2 + a u^2), both generators isotropic
trans_iso_noniso        translational, one isotropic generator, a != 0, 1
trans_noniso_noniso     translational, no isotropic generator, minimal
dual_trans_iso_noniso   metric dual of trans_iso_noniso, ratio 1/a
dual_trans_minimal      metric dual of trans_noniso_noniso, minimal
======================  =====================================================

"Minimal" always means isotropic minimal (H = 0, ratio -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import quad

from .errors import (
    InvalidParams,
    OutOfDomain,
    SingularLocus,
    SingularSimilarity,
    StencilOutOfDomain,
)
from .geometry import ParamJet2

SINGULAR_MARGIN = 1e-3
_INF = float("inf")


@dataclass(frozen=True)
class FamilySpec:
    """A concrete member of a catalog family: id, parameter values, domain box."""

    family_id: str
    params: Mapping[str, float]
    domain: tuple[float, float, float, float]
    singular_loci: tuple[str, ...] = ()


@dataclass(frozen=True)
class G8Element:
    """Isotropic similarity x' = A x + b with A = [[h1,-h2,0],[h2,h1,0],[c1,c2,c3]].

    Congruences are the subgroup with h1 = cos(phi), h2 = sin(phi), c3 = 1.
    Invertible iff c3 != 0 and h1^2 + h2^2 != 0.
    """

    h1: float = 1.0
    h2: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 1.0
    b: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([
            [self.h1, -self.h2, 0.0],
            [self.h2, self.h1, 0.0],
            [self.c1, self.c2, self.c3],
        ])

    def require_invertible(self) -> None:
        if self.c3 == 0.0 or (self.h1 == 0.0 and self.h2 == 0.0):
            raise SingularSimilarity("similarity needs c3 != 0 and (h1, h2) != 0")

    @staticmethod
    def rotation(phi: float) -> "G8Element":
        return G8Element(h1=math.cos(phi), h2=math.sin(phi))


def apply_similarity(g: G8Element, jet: ParamJet2) -> ParamJet2:
    """Push a parametric jet through an isotropic similarity."""
    g.require_invertible()
    A = g.matrix
    b = np.asarray(g.b, float)

    def lin(w):
        return np.einsum("ij,...j->...i", A, w)

    return ParamJet2(
        r=lin(jet.r) + b,
        ru=lin(jet.ru), rv=lin(jet.rv),
        ruu=lin(jet.ruu), ruv=lin(jet.ruv), rvv=lin(jet.rvv),
    )


def _stack(x, y, z) -> np.ndarray:
    return np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float),
                                        np.asarray(z, float)), axis=-1)


def _jet(parts) -> ParamJet2:
    (x, y, z), (xu, yu, zu), (xv, yv, zv), (xuu, yuu, zuu), (xuv, yuv, zuv), (xvv, yvv, zvv) = parts
    return ParamJet2(
        r=_stack(x, y, z), ru=_stack(xu, yu, zu), rv=_stack(xv, yv, zv),
        ruu=_stack(xuu, yuu, zuu), ruv=_stack(xuv, yuv, zuv), rvv=_stack(xvv, yvv, zvv),
    )


def _need(params, name, family_id):
    if name not in params:
        raise InvalidParams(f"{family_id} requires parameter '{name}'")
    return float(params[name])


# ---------------------------------------------------------------------------
# chart builders, one per family


def _paraboloid(params, U, V):
    a = params["a"]
    return _jet([
        (U, V, U * U + a * V * V),
        (np.ones_like(U), 0.0, 2.0 * U),
        (0.0, np.ones_like(V), 2.0 * a * V),
        (0.0, 0.0, 2.0 * np.ones_like(U)),
        (0.0, 0.0, np.zeros_like(U)),
        (0.0, 0.0, 2.0 * a * np.ones_like(U)),
    ])


def _trans_paraboloid(params, U, V):
    a = params["a"]
    return _jet([
        (U, V, V * V + a * U * U),
        (np.ones_like(U), 0.0, 2.0 * a * U),
        (0.0, np.ones_like(V), 2.0 * V),
        (0.0, 0.0, 2.0 * a * np.ones_like(U)),
        (0.0, 0.0, np.zeros_like(U)),
        (0.0, 0.0, 2.0 * np.ones_like(U)),
    ])


def _polar_chart(U, V, h, hp, hpp, pitch=0.0):
    # (u cos v, u sin v, h(u) + pitch*v); rotational for pitch = 0
    c, s = np.cos(V), np.sin(V)
    return _jet([
        (U * c, U * s, h + pitch * V),
        (c, s, hp),
        (-U * s, U * c, pitch * np.ones_like(V)),
        (np.zeros_like(U), 0.0, hpp),
        (-s, c, np.zeros_like(U)),
        (-U * c, -U * s, np.zeros_like(U)),
    ])


def _rot_power(m: float):
    def jets(params, U, V):
        h = U ** m
        return _polar_chart(U, V, h, m * U ** (m - 1.0), m * (m - 1.0) * U ** (m - 2.0))
    return jets


def _rotational_power_1(params, U, V):
    return _rot_power(1.0 + params["a"])(params, U, V)


def _rotational_power_2(params, U, V):
    a = params["a"]
    return _rot_power((1.0 + a) / a)(params, U, V)


def _logarithmoid(params, U, V):
    return _polar_chart(U, V, 2.0 * np.log(U), 2.0 / U, -2.0 / (U * U))


def _helicoid(params, U, V):
    z0 = np.zeros_like(U)
    return _polar_chart(U, V, z0, z0, z0, pitch=1.0)


def _helical_log(params, U, V):
    c = params["c"]
    return _polar_chart(U, V, c * np.log(U), c / U, -c / (U * U), pitch=1.0)


def _spiral_ruled(params, U, V):
    a = params["a"]
    m = (a + 1.0) / math.sqrt(abs(a))
    c, s = np.cos(V), np.sin(V)
    e = np.exp(m * V)
    return _jet([
        (U * c, U * s, e),
        (c, s, np.zeros_like(U)),
        (-U * s, U * c, m * e),
        (np.zeros_like(U), 0.0, np.zeros_like(U)),
        (-s, c, np.zeros_like(U)),
        (-U * c, -U * s, m * m * e),
    ])


def _helical_general_profile(a: float, U):
    """Radial coordinate w(u), its derivatives, and the height part of the chart.

    w = (cos u sin^a u)^(-1/(a+1)); log-derivative q = (tan u - a cot u)/(a+1).
    Height zeta(u) = u + cot(2u) + c_a csc(2u), c_a = (a^2+1)/(a^2-1).
    """
    ca = (a * a + 1.0) / (a * a - 1.0)
    t, ct = np.tan(U), 1.0 / np.tan(U)
    w = (np.cos(U) * np.sin(U) ** a) ** (-1.0 / (a + 1.0))
    q = (t - a * ct) / (a + 1.0)
    qp = (1.0 + t * t + a * (1.0 + ct * ct)) / (a + 1.0)
    wp = w * q
    wpp = w * (q * q + qp)
    csc2, cot2 = 1.0 / np.sin(2.0 * U), 1.0 / np.tan(2.0 * U)
    zeta = U + cot2 + ca * csc2
    zeta_u = 1.0 - 2.0 * csc2 * csc2 - 2.0 * ca * csc2 * cot2
    zeta_uu = 8.0 * csc2 * csc2 * cot2 + 4.0 * ca * (csc2 * cot2 * cot2 + csc2 ** 3)
    return w, wp, wpp, zeta, zeta_u, zeta_uu


def _helical_general(params, U, V):
    a = params["a"]
    w, wp, wpp, zeta, zeta_u, zeta_uu = _helical_general_profile(a, U)
    c, s = np.cos(V), np.sin(V)
    return _jet([
        (w * c, w * s, zeta + V),
        (wp * c, wp * s, zeta_u),
        (-w * s, w * c, np.ones_like(V)),
        (wpp * c, wpp * s, zeta_uu),
        (-wp * s, wp * c, np.zeros_like(U)),
        (-w * c, -w * s, np.zeros_like(U)),
    ])


def _tin_b(a: float) -> float:
    return (a + 1.0) / (a - 1.0)


def _trans_iso_noniso(params, U, V):
    a = params["a"]
    b = _tin_b(a)
    B2 = b * b - 1.0
    s, c = np.sin(V), np.cos(V)
    beta = b - s
    x = V + b * c
    y = b * s + B2 * np.log(np.abs(beta)) - B2 * U
    z = np.exp(U)
    return _jet([
        (x, y, z),
        (np.zeros_like(U), -B2 * np.ones_like(U), z),
        (1.0 - b * s, b * c - B2 * c / beta, np.zeros_like(V)),
        (np.zeros_like(U), np.zeros_like(U), z),
        (np.zeros_like(U), np.zeros_like(U), np.zeros_like(U)),
        (-b * c, -b * s - B2 * (1.0 - b * s) / (beta * beta), np.zeros_like(V)),
    ])


def _trans_noniso_noniso(params, U, V):
    tu, tv = np.tan(U), np.tan(V)
    su, sv = 1.0 + tu * tu, 1.0 + tv * tv
    one = np.ones_like(U + V)
    zero = np.zeros_like(one)
    return _jet([
        (U + V, np.log(np.abs(np.cos(U))) - np.log(np.abs(np.cos(V))), U + zero),
        (one, -tu, one),
        (one, tv, zero),
        (zero, -su, zero),
        (zero, zero, zero),
        (zero, sv, zero),
    ])


def _dtin_parts(a: float, V):
    """v-profile of the dual translational chart: P, Q and derivatives.

    P = cos v / (b - sin v)
    Q = v cos v / (B2 (b - sin v)) - b/(b - sin v) - log|b - sin v|,  B2 = b^2 - 1
    """
    b = _tin_b(a)
    B2 = b * b - 1.0
    s, c = np.sin(V), np.cos(V)
    beta = b - s
    P = c / beta
    Pp = (1.0 - b * s) / (beta * beta)
    Ppp = c * (2.0 - b * b - b * s) / (beta ** 3)
    Q = V * c / (B2 * beta) - b / beta - np.log(np.abs(beta))
    # T = v c / beta; Q = T/B2 - b/beta - log|beta|
    Tp = (c - V * s) / beta + V * c * c / (beta * beta)
    Qp = Tp / B2 - b * c / (beta * beta) + c / beta
    Tpp = ((-2.0 * s - V * c) / beta
           + (2.0 * c * c - 3.0 * V * c * s) / (beta * beta)
           + 2.0 * V * c ** 3 / (beta ** 3))
    Qpp = (Tpp / B2 + b * s / (beta * beta) - 2.0 * b * c * c / (beta ** 3)
           - s / beta + c * c / (beta * beta))
    return P, Pp, Ppp, Q, Qp, Qpp


def _dual_trans_iso_noniso(params, U, V):
    a = params["a"]
    P, Pp, Ppp, Q, Qp, Qpp = _dtin_parts(a, V)
    e = np.exp(U)
    one = np.ones_like(U + V)
    zero = np.zeros_like(one)
    return _jet([
        (e * P, e * one, e * (Q + U)),
        (e * P, e * one, e * (Q + U + 1.0)),
        (e * Pp, zero, e * Qp),
        (e * P, e * one, e * (Q + U + 2.0)),
        (e * Pp, zero, e * Qp),
        (e * Ppp, zero, e * Qpp),
    ])


def _dual_trans_minimal(params, U, V):
    tu, tv = np.tan(U), np.tan(V)
    su, sv = 1.0 + tu * tu, 1.0 + tv * tv
    S = tu + tv
    R = np.log(np.abs(np.cos(V))) - np.log(np.abs(np.cos(U))) - U * tu + V * tv
    Ru, Rv = -U * su, V * sv
    Ruu = -su * (1.0 + 2.0 * U * tu)
    Rvv = sv * (1.0 + 2.0 * V * tv)
    S2, S3 = S * S, S ** 3
    x = tv / S
    y = 1.0 / S
    z = R / S
    xu = -tv * su / S2
    xv = sv * tu / S2
    yu = -su / S2
    yv = -sv / S2
    zu = (Ru * S - R * su) / S2
    zv = (Rv * S - R * sv) / S2
    xuu = -2.0 * su * tv * (tu * S - su) / S3
    xuv = -su * sv * (tu - tv) / S3
    xvv = 2.0 * sv * tu * (tv * S - sv) / S3
    yuu = -2.0 * su * (tu * S - su) / S3
    yuv = 2.0 * su * sv / S3
    yvv = -2.0 * sv * (tv * S - sv) / S3
    zuu = (Ruu * S2 - 2.0 * su * tu * R * S - 2.0 * su * (Ru * S - R * su)) / S3
    zuv = (-Ru * sv * S - Rv * su * S + 2.0 * su * sv * R) / S3
    zvv = (Rvv * S2 - 2.0 * sv * tv * R * S - 2.0 * sv * (Rv * S - R * sv)) / S3
    return _jet([
        (x, y, z), (xu, yu, zu), (xv, yv, zv),
        (xuu, yuu, zuu), (xuv, yuv, zuv), (xvv, yvv, zvv),
    ])


# ---------------------------------------------------------------------------
# Euclidean rotational comparison family: h'(r) = r^a / sqrt(1 - r^(2a)).
# For a > 0 the profile lives on r in (0, 1), anchored h(0) = 0; for a < 0 it
# lives on r in (1, inf), anchored at the default domain's left edge.

_euclid_cache: dict = {}


def _euclid_anchor(a: float) -> float:
    return 0.0 if a > 0 else 0.9 ** (1.0 / a)


def _euclid_slope(a: float):
    def hp(r):
        return r ** a / np.sqrt(1.0 - r ** (2.0 * a))
    return hp


def _euclid_height_values(a: float, U: np.ndarray) -> np.ndarray:
    """h(u) by adaptive quadrature from the anchor, cached per (a, u)."""
    hp = _euclid_slope(a)
    anchor = _euclid_anchor(a)
    flat = np.atleast_1d(np.asarray(U, float)).ravel()
    out = np.empty_like(flat)
    cache = _euclid_cache.setdefault(a, {})
    for i, u in enumerate(flat):
        key = float(u)
        if key not in cache:
            val, _err = quad(hp, anchor, key, epsabs=1e-12, epsrel=1e-12, limit=200)
            cache[key] = val
        out[i] = cache[key]
    return out.reshape(np.shape(U)) if np.ndim(U) else float(out[0])


def _euclidean_rotational(params, U, V):
    a = params["a"]
    Ua = np.asarray(U, float)
    h = _euclid_height_values(a, Ua)
    g = 1.0 - Ua ** (2.0 * a)
    hp = Ua ** a / np.sqrt(g)
    hpp = a * Ua ** (a - 1.0) * g ** (-1.5)
    return _polar_chart(U, V, h, hp, hpp)


# ---------------------------------------------------------------------------
# validity, singular loci, default domains


def _dist_to_sin_roots(V, rhs: float):
    """Distance from angles V to the solution set of sin(v) = rhs (empty -> inf)."""
    if abs(rhs) > 1.0:
        return np.full(np.shape(V) or (), _INF)
    r1 = math.asin(rhs)
    r2 = math.pi - r1
    V = np.asarray(V, float)

    def angdist(alpha, root):
        d = np.mod(alpha - root + math.pi, 2.0 * math.pi) - math.pi
        return np.abs(d)

    return np.minimum(angdist(V, r1), angdist(V, r2))


def _tin_loci_dist(a: float, U, V):
    b = _tin_b(a)
    d = np.full(np.shape(np.asarray(U) + np.asarray(V)) or (), _INF)
    d = np.minimum(d, _dist_to_sin_roots(V, b))          # log pole (reachable if |b|<=1)
    if b != 0.0:
        d = np.minimum(d, _dist_to_sin_roots(V, 1.0 / b))  # isotropic tangent plane
    return d


def _tin_default_v_interval(a: float) -> tuple[float, float]:
    """Widest locus-free v-interval inside [-pi, pi], shrunk by 0.1."""
    b = _tin_b(a)
    roots = []
    for rhs in ({b} | ({1.0 / b} if b != 0.0 else set())):
        if abs(rhs) <= 1.0:
            r1 = math.asin(rhs)
            for r in (r1, math.pi - r1, -math.pi - r1):
                if -math.pi <= r <= math.pi:
                    roots.append(r)
    pts = sorted(set([-math.pi, math.pi] + roots))
    lo, hi = max(
        zip(pts[:-1], pts[1:]),
        key=lambda seg: seg[1] - seg[0],
    )
    return lo + 0.1, hi - 0.1


@dataclass(frozen=True)
class _Entry:
    family_id: str
    jets: Callable
    param_names: tuple[str, ...]
    defaults: Mapping[str, float]
    constraint_text: str
    ratio_kind: str  # "isotropic" or "euclidean"
    ratio_text: str
    validate: Callable[[Mapping[str, float]], None]
    ratio_for_residual: Callable[[Mapping[str, float]], float]
    default_domain: Callable[[Mapping[str, float]], tuple[float, float, float, float]]
    loci_desc: Callable[[Mapping[str, float]], tuple[str, ...]]
    loci_dist: Callable[[Mapping[str, float], np.ndarray, np.ndarray], np.ndarray]
    hard_valid: Callable[[Mapping[str, float], np.ndarray, np.ndarray], np.ndarray]
    is_minimal: Callable[[Mapping[str, float]], bool] = field(default=lambda p: False)


def _no_loci(params, U, V):
    return np.full(np.shape(np.asarray(U) + np.asarray(V)) or (), _INF)


def _all_valid(params, U, V):
    return np.ones(np.shape(np.asarray(U) + np.asarray(V)) or (), dtype=bool)


def _positive_u(params, U, V):
    return np.broadcast_to(np.asarray(U, float) > 0.0,
                           np.shape(np.asarray(U) + np.asarray(V)) or ()).copy()


def _axis_dist(params, U, V):
    return np.broadcast_to(np.abs(np.asarray(U, float)),
                           np.shape(np.asarray(U) + np.asarray(V)) or ()).astype(float)


def _require(cond: bool, msg: str):
    if not cond:
        raise InvalidParams(msg)


def _check_a(params, family_id, forbidden=(0.0,), need_negative=False):
    a = _need(params, "a", family_id)
    for bad in forbidden:
        _require(a != bad, f"{family_id}: a = {bad} is excluded")
    if need_negative:
        _require(a < 0.0, f"{family_id}: requires a < 0")
    return a


_REGISTRY: dict[str, _Entry] = {}


def _register(entry: _Entry):
    _REGISTRY[entry.family_id] = entry


_register(_Entry(
    family_id="paraboloid",
    jets=_paraboloid,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a != 0 (a = 1 gives the unit sphere of the geometry)",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=lambda p: _check_a(p, "paraboloid"),
    ratio_for_residual=lambda p: p["a"],
    default_domain=lambda p: (-1.0, 1.0, -1.0, 1.0),
    loci_desc=lambda p: (),
    loci_dist=_no_loci,
    hard_valid=_all_valid,
    is_minimal=lambda p: p["a"] == -1.0,
))

_register(_Entry(
    family_id="trans_paraboloid",
    jets=_trans_paraboloid,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a != 0; both generator parabolas lie in isotropic planes",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=lambda p: _check_a(p, "trans_paraboloid"),
    ratio_for_residual=lambda p: p["a"],
    default_domain=lambda p: (-1.0, 1.0, -1.0, 1.0),
    loci_desc=lambda p: (),
    loci_dist=_no_loci,
    hard_valid=_all_valid,
    is_minimal=lambda p: p["a"] == -1.0,
))

_register(_Entry(
    family_id="rotational_power_1",
    jets=_rotational_power_1,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a not in {0, -1}; profile z = r^(1+a)",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=lambda p: _check_a(p, "rotational_power_1", forbidden=(0.0, -1.0)),
    ratio_for_residual=lambda p: p["a"],
    default_domain=lambda p: (0.5, 2.0, 0.0, math.pi),
    loci_desc=lambda p: ("u = 0 (rotation axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
))

_register(_Entry(
    family_id="rotational_power_2",
    jets=_rotational_power_2,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a not in {0, -1}; profile z = r^((1+a)/a)",
    ratio_kind="isotropic",
    ratio_text="a (same ratio law, reciprocal exponent)",
    validate=lambda p: _check_a(p, "rotational_power_2", forbidden=(0.0, -1.0)),
    ratio_for_residual=lambda p: p["a"],
    default_domain=lambda p: (0.5, 2.0, 0.0, math.pi),
    loci_desc=lambda p: ("u = 0 (rotation axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
))

_register(_Entry(
    family_id="logarithmoid",
    jets=_logarithmoid,
    param_names=(),
    defaults={},
    constraint_text="no parameters; the rotational minimal surface",
    ratio_kind="isotropic",
    ratio_text="-1",
    validate=lambda p: None,
    ratio_for_residual=lambda p: -1.0,
    default_domain=lambda p: (0.5, 3.0, 0.0, 2.0 * math.pi),
    loci_desc=lambda p: ("u = 0 (rotation axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
    is_minimal=lambda p: True,
))


def _euclid_validate(p):
    _check_a(p, "euclidean_rotational")


def _euclid_domain(p):
    a = p["a"]
    edge = 0.9 ** (1.0 / a)
    if a > 0:
        return (0.1, edge, 0.0, math.pi)
    return (edge, 2.0 * edge, 0.0, math.pi)


def _euclid_hard(params, U, V):
    a = params["a"]
    Ua = np.asarray(U, float)
    ok = (Ua > 0.0) & (Ua ** (2.0 * a) < 1.0)
    return np.broadcast_to(ok, np.shape(np.asarray(U) + np.asarray(V)) or ()).copy()


def _euclid_loci_dist(params, U, V):
    Ua = np.abs(np.asarray(U, float))
    d = np.minimum(Ua, np.abs(Ua - 1.0))  # axis and the slope singularity r = 1
    return np.broadcast_to(d, np.shape(np.asarray(U) + np.asarray(V)) or ()).astype(float)


_register(_Entry(
    family_id="euclidean_rotational",
    jets=_euclidean_rotational,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a != 0; valid where r^(2a) < 1; ratio law is Euclidean",
    ratio_kind="euclidean",
    ratio_text="a (Euclidean principal curvatures)",
    validate=_euclid_validate,
    ratio_for_residual=lambda p: p["a"],
    default_domain=_euclid_domain,
    loci_desc=lambda p: ("u = 0 (rotation axis)", "u = 1 (profile slope unbounded)"),
    loci_dist=_euclid_loci_dist,
    hard_valid=_euclid_hard,
))

_register(_Entry(
    family_id="helicoid",
    jets=_helicoid,
    param_names=(),
    defaults={},
    constraint_text="no parameters; minimal in both geometries",
    ratio_kind="isotropic",
    ratio_text="-1",
    validate=lambda p: None,
    ratio_for_residual=lambda p: -1.0,
    default_domain=lambda p: (0.5, 2.0, 0.0, math.pi),
    loci_desc=lambda p: ("u = 0 (screw axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
    is_minimal=lambda p: True,
))

_register(_Entry(
    family_id="spiral_ruled",
    jets=_spiral_ruled,
    param_names=("a",),
    defaults={"a": -2.0},
    constraint_text="a < 0, a != -1; rulings through the z-axis direction field",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=lambda p: _check_a(p, "spiral_ruled", forbidden=(0.0, -1.0), need_negative=True),
    ratio_for_residual=lambda p: p["a"],
    default_domain=lambda p: (0.5, 2.0, 0.0, math.pi),
    loci_desc=lambda p: ("u = 0 (directrix axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
))


def _helical_general_validate(p):
    a = _check_a(p, "helical_general")
    _require(abs(a) != 1.0, "helical_general: a = +-1 is excluded")


def _helical_general_domain(p):
    a = p["a"]
    lo, hi = 0.1, math.pi / 2.0 - 0.1
    if a > 0:
        ustar = math.atan(math.sqrt(a))
        # keep to the left branch when it is wide enough, else the right one
        if ustar - 0.05 - lo >= 0.2:
            hi = ustar - 0.05
        else:
            lo = ustar + 0.05
    return (lo, hi, 0.0, math.pi)


def _helical_general_loci_desc(p):
    loci = ["u = 0", "u = pi/2 (chart boundary)"]
    if p["a"] > 0:
        loci.append("tan^2(u) = a (singular curve of the surface)")
    return tuple(loci)


def _helical_general_loci_dist(params, U, V):
    a = params["a"]
    Ua = np.asarray(U, float)
    d = np.minimum(np.abs(Ua), np.abs(math.pi / 2.0 - Ua))
    if a > 0:
        d = np.minimum(d, np.abs(Ua - math.atan(math.sqrt(a))))
    return np.broadcast_to(d, np.shape(np.asarray(U) + np.asarray(V)) or ()).astype(float)


def _helical_general_hard(params, U, V):
    Ua = np.asarray(U, float)
    ok = (Ua > 0.0) & (Ua < math.pi / 2.0)
    return np.broadcast_to(ok, np.shape(np.asarray(U) + np.asarray(V)) or ()).copy()


_register(_Entry(
    family_id="helical_general",
    jets=_helical_general,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a not in {0, 1, -1}; helical surface of pitch 1",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=_helical_general_validate,
    ratio_for_residual=lambda p: p["a"],
    default_domain=_helical_general_domain,
    loci_desc=_helical_general_loci_desc,
    loci_dist=_helical_general_loci_dist,
    hard_valid=_helical_general_hard,
))

_register(_Entry(
    family_id="helical_log",
    jets=_helical_log,
    param_names=("c",),
    defaults={"c": 1.0},
    constraint_text="profile c log(u) over u > 0; minimal helical surface",
    ratio_kind="isotropic",
    ratio_text="-1",
    validate=lambda p: _need(p, "c", "helical_log"),
    ratio_for_residual=lambda p: -1.0,
    default_domain=lambda p: (0.5, 2.0, 0.0, math.pi),
    loci_desc=lambda p: ("u = 0 (screw axis)",),
    loci_dist=_axis_dist,
    hard_valid=_positive_u,
    is_minimal=lambda p: True,
))


def _tin_validate(p):
    a = _check_a(p, "trans_iso_noniso")
    _require(a != 1.0, "trans_iso_noniso: a = 1 is excluded (b unbounded)")


def _tin_domain(p):
    lo, hi = _tin_default_v_interval(p["a"])
    return (-1.0, 1.0, lo, hi)


def _tin_loci_desc(p):
    b = _tin_b(p["a"])
    loci = []
    if abs(b) <= 1.0:
        loci.append("sin v = b (logarithm pole)")
    if b != 0.0 and abs(1.0 / b) <= 1.0:
        loci.append("b sin v = 1 (isotropic tangent plane)")
    return tuple(loci)


_register(_Entry(
    family_id="trans_iso_noniso",
    jets=_trans_iso_noniso,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="a not in {0, 1}; b = (a+1)/(a-1); one isotropic generator",
    ratio_kind="isotropic",
    ratio_text="a",
    validate=_tin_validate,
    ratio_for_residual=lambda p: p["a"],
    default_domain=_tin_domain,
    loci_desc=_tin_loci_desc,
    loci_dist=lambda p, U, V: np.broadcast_to(
        _tin_loci_dist(p["a"], U, V), np.shape(np.asarray(U) + np.asarray(V)) or ()).astype(float),
    hard_valid=_all_valid,
    is_minimal=lambda p: p["a"] == -1.0,
))


def _tnn_dist(params, U, V):
    Ua, Va = np.asarray(U, float), np.asarray(V, float)
    d = np.abs(Ua + Va) / math.sqrt(2.0)
    edge = np.minimum(math.pi / 2.0 - np.abs(Ua), math.pi / 2.0 - np.abs(Va))
    return np.minimum(d, np.maximum(edge, 0.0))


def _tnn_hard(params, U, V):
    Ua, Va = np.asarray(U, float), np.asarray(V, float)
    return (np.abs(Ua) < math.pi / 2.0) & (np.abs(Va) < math.pi / 2.0)


_register(_Entry(
    family_id="trans_noniso_noniso",
    jets=_trans_noniso_noniso,
    param_names=(),
    defaults={},
    constraint_text="minimal; (u, v) in (-pi/2, pi/2)^2 off the line u + v = 0",
    ratio_kind="isotropic",
    ratio_text="-1",
    validate=lambda p: None,
    ratio_for_residual=lambda p: -1.0,
    default_domain=lambda p: (-1.3, -0.8, 0.2, 0.65),
    loci_desc=lambda p: ("u + v = 0 (isotropic tangent planes)", "|u| = pi/2", "|v| = pi/2"),
    loci_dist=_tnn_dist,
    hard_valid=_tnn_hard,
    is_minimal=lambda p: True,
))


def _dtin_validate(p):
    a = _check_a(p, "dual_trans_iso_noniso")
    _require(a != 1.0, "dual_trans_iso_noniso: a = 1 is excluded (b unbounded)")


_register(_Entry(
    family_id="dual_trans_iso_noniso",
    jets=_dual_trans_iso_noniso,
    param_names=("a",),
    defaults={"a": 2.0},
    constraint_text="metric dual of trans_iso_noniso(a); ratio (b-1)/(b+1) = 1/a",
    ratio_kind="isotropic",
    ratio_text="1/a",
    validate=_dtin_validate,
    ratio_for_residual=lambda p: p["a"],  # H^2/K target is symmetric in a <-> 1/a
    default_domain=_tin_domain,
    loci_desc=lambda p: ("sin v = b (pole of the chart)",
                         "b sin v = 1 (image of the primal singular locus)"),
    loci_dist=lambda p, U, V: np.broadcast_to(
        _tin_loci_dist(p["a"], U, V), np.shape(np.asarray(U) + np.asarray(V)) or ()).astype(float),
    hard_valid=_all_valid,
    is_minimal=lambda p: p["a"] == -1.0,
))

_register(_Entry(
    family_id="dual_trans_minimal",
    jets=_dual_trans_minimal,
    param_names=(),
    defaults={},
    constraint_text="metric dual of trans_noniso_noniso; minimal",
    ratio_kind="isotropic",
    ratio_text="-1",
    validate=lambda p: None,
    ratio_for_residual=lambda p: -1.0,
    default_domain=lambda p: (0.2, 1.3, 0.2, 1.3),
    loci_desc=lambda p: ("tan u + tan v = 0 (chart pole)", "|u| = pi/2", "|v| = pi/2"),
    loci_dist=_tnn_dist,
    hard_valid=_tnn_hard,
    is_minimal=lambda p: True,
))


# ---------------------------------------------------------------------------
# public API


def family_ids() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def catalog_entry(family_id: str) -> _Entry:
    try:
        return _REGISTRY[family_id]
    except KeyError:
        raise InvalidParams(f"unknown family '{family_id}'") from None


def make_spec(family_id: str, params: Mapping[str, float] | None = None,
              domain: tuple[float, float, float, float] | None = None) -> FamilySpec:
    """Validate parameters, fill defaults, and build a FamilySpec."""
    entry = catalog_entry(family_id)
    merged = dict(entry.defaults)
    for k, v in (params or {}).items():
        if k not in entry.param_names:
            raise InvalidParams(f"{family_id} does not take parameter '{k}'")
        merged[k] = float(v)
    entry.validate(merged)
    dom = tuple(float(t) for t in (domain if domain is not None else entry.default_domain(merged)))
    if len(dom) != 4:
        raise InvalidParams("domain must be (u_min, u_max, v_min, v_max)")
    return FamilySpec(family_id=family_id, params=merged, domain=dom,
                      singular_loci=entry.loci_desc(merged))


def default_domain(family_id: str, params: Mapping[str, float] | None = None):
    return make_spec(family_id, params).domain


def ratio_kind(spec: FamilySpec) -> str:
    return catalog_entry(spec.family_id).ratio_kind


def ratio_for_residual(spec: FamilySpec) -> float:
    return catalog_entry(spec.family_id).ratio_for_residual(spec.params)


def is_minimal(spec: FamilySpec) -> bool:
    return catalog_entry(spec.family_id).is_minimal(spec.params)


def singular_distance(spec: FamilySpec, U, V) -> np.ndarray:
    """Parameter-space distance to the nearest singular locus (inf if none)."""
    return catalog_entry(spec.family_id).loci_dist(spec.params, U, V)


def hard_valid(spec: FamilySpec, U, V) -> np.ndarray:
    """Boolean mask of points inside the family's hard validity region."""
    return catalog_entry(spec.family_id).hard_valid(spec.params, U, V)


def evaluate(spec: FamilySpec, u, v, check: bool = True,
             margin: float = SINGULAR_MARGIN) -> ParamJet2:
    """Exact second-order jet of the chart at (u, v) (scalars or arrays).

    With check=True, raises OutOfDomain outside the hard validity region
    and SingularLocus within `margin` of a singular locus. check=False is
    for grid sampling, which masks instead of raising.
    """
    entry = catalog_entry(spec.family_id)
    if check:
        if not np.all(entry.hard_valid(spec.params, u, v)):
            raise OutOfDomain(f"{spec.family_id}: parameters outside the validity region")
        if np.any(entry.loci_dist(spec.params, u, v) < margin):
            raise SingularLocus(f"{spec.family_id}: within {margin} of a singular locus")
    with np.errstate(all="ignore"):
        return entry.jets(spec.params, np.asarray(u, float), np.asarray(v, float))


def evaluate_positions(spec: FamilySpec, U, V, check: bool = False) -> np.ndarray:
    """Positions only, shape (..., 3)."""
    return evaluate(spec, U, V, check=check).r


def height_field(spec: FamilySpec, u0: float, v0: float) -> Callable[[float, float], float]:
    """Local height field z = f(x, y) near the chart point (u0, v0).

    Inverts the top view by Newton iteration with the chart's analytic
    Jacobian, warm-started at (u0, v0); intended for finite-difference
    stencils close to the base point. Raises StencilOutOfDomain when the
    iteration does not converge.
    """
    def f(x: float, y: float) -> float:
        u, v = float(u0), float(v0)
        for _ in range(40):
            jet = evaluate(spec, u, v, check=False)
            rx = float(jet.r[0]) - x
            ry = float(jet.r[1]) - y
            xu, yu = float(jet.ru[0]), float(jet.ru[1])
            xv, yv = float(jet.rv[0]), float(jet.rv[1])
            det = xu * yv - yu * xv
            if det == 0.0 or not np.isfinite(det):
                raise StencilOutOfDomain("top view not invertible during height inversion")
            du = (-rx * yv + ry * xv) / det
            dv = (-xu * ry + yu * rx) / det
            u += du
            v += dv
            if abs(du) + abs(dv) < 1e-15 * (1.0 + abs(u) + abs(v)):
                break
        jet = evaluate(spec, u, v, check=False)
        if abs(float(jet.r[0]) - x) + abs(float(jet.r[1]) - y) > 1e-9:
            raise StencilOutOfDomain("height-field inversion did not converge")
        return float(jet.r[2])

    return f
