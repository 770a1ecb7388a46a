"""Curvature machinery for admissible surfaces in isotropic space.

The isotropic semi-norm of (x, y, z) is sqrt(x^2 + y^2): lengths and angles
live in the top view, the projection onto z = 0. A surface point is
admissible when its tangent plane does not contain the vertical direction;
there the surface is locally a graph z = f(x, y) and its shape is carried
entirely by the Hessian of f. Principal curvatures are the Hessian
eigenvalues, H is their mean, K their product, and the normal curvature
along a unit top-view direction t is t . Hess(f) . t.

All fields of the jet containers may be scalars or numpy arrays of a common
broadcast shape; every operation in this module is vectorized over that
shape. Vector-valued fields carry the vector in the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateK,
    NonAdmissiblePoint,
    StencilOutOfDomain,
    Umbilic,
)

# Numerical floors, in the units of the quantity they guard.
K_EPS = 1e-12
JACOBIAN_EPS = 1e-12
UMBILIC_RTOL = 1e-10
FD_STEP = 1e-4


def point3(x: float, y: float, z: float) -> np.ndarray:
    """Pack coordinates into a point array of shape (..., 3)."""
    p = np.stack([np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)], axis=-1)
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def isotropic_norm(v) -> np.ndarray | float:
    """Semi-norm sqrt(x^2 + y^2) of a vector (..., 3); z does not contribute."""
    v = np.asarray(v, float)
    return np.hypot(v[..., 0], v[..., 1])


def unit_topdir(t1, t2) -> np.ndarray:
    """Normalize a top-view direction to unit Euclidean length, shape (..., 2)."""
    t = np.stack([np.asarray(t1, float), np.asarray(t2, float)], axis=-1)
    n = np.linalg.norm(t, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise ValueError("zero top-view direction")
    return t / n


@dataclass(frozen=True)
class ParamJet2:
    """Second-order jet of a parametric surface r(u, v), fields shaped (..., 3)."""

    r: np.ndarray
    ru: np.ndarray
    rv: np.ndarray
    ruu: np.ndarray
    ruv: np.ndarray
    rvv: np.ndarray

    @property
    def det_topview(self):
        """Jacobian determinant of the top view (x, y) with respect to (u, v)."""
        return self.ru[..., 0] * self.rv[..., 1] - self.rv[..., 0] * self.ru[..., 1]


@dataclass(frozen=True)
class Jet2Height:
    """Second-order jet of a height field z = f(x, y) at base point (x0, y0)."""

    x0: np.ndarray | float
    y0: np.ndarray | float
    f: np.ndarray | float
    fx: np.ndarray | float
    fy: np.ndarray | float
    fxx: np.ndarray | float
    fxy: np.ndarray | float
    fyy: np.ndarray | float

    @property
    def point(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(
            np.asarray(self.x0, float), np.asarray(self.y0, float),
            np.asarray(self.f, float)), axis=-1)


@dataclass(frozen=True)
class IsoCurvature:
    """Isotropic curvature data: k1 >= k2, d1/d2 unit top-view eigen directions."""

    H: np.ndarray | float
    K: np.ndarray | float
    k1: np.ndarray | float
    k2: np.ndarray | float
    d1: np.ndarray
    d2: np.ndarray
    umbilic: np.ndarray | bool


def fd_jet(surface: Callable, x0: float, y0: float, h: float = FD_STEP) -> Jet2Height:
    """Independent 9-point central-difference jet of a height-field callable.

    Second-order accurate in h. Used as the oracle against analytic jets;
    raises StencilOutOfDomain when any stencil evaluation fails or returns
    a non-finite value.
    """
    if h <= 0:
        raise ValueError("step h must be positive")

    def ev(x, y):
        try:
            z = surface(x, y)
        except Exception as exc:
            raise StencilOutOfDomain(f"surface evaluation failed at ({x}, {y})") from exc
        z = float(z)
        if not np.isfinite(z):
            raise StencilOutOfDomain(f"non-finite surface value at ({x}, {y})")
        return z

    f00 = ev(x0, y0)
    fp0 = ev(x0 + h, y0)
    fm0 = ev(x0 - h, y0)
    f0p = ev(x0, y0 + h)
    f0m = ev(x0, y0 - h)
    fpp = ev(x0 + h, y0 + h)
    fpm = ev(x0 + h, y0 - h)
    fmp = ev(x0 - h, y0 + h)
    fmm = ev(x0 - h, y0 - h)
    return Jet2Height(
        x0=x0, y0=y0, f=f00,
        fx=(fp0 - fm0) / (2 * h),
        fy=(f0p - f0m) / (2 * h),
        fxx=(fp0 - 2 * f00 + fm0) / (h * h),
        fyy=(f0p - 2 * f00 + f0m) / (h * h),
        fxy=(fpp - fpm - fmp + fmm) / (4 * h * h),
    )


def height_jet_from_param(jet: ParamJet2, jacobian_eps: float | None = None) -> Jet2Height:
    """Convert a parametric 2-jet to the height-field 2-jet at the same point.

    Solves the chain-rule systems: the gradient from the 2x2 top-view
    Jacobian J, the Hessian from Hess = J^-1 Hp J^-T where Hp is the
    second-order data with the gradient part removed.

    Raises NonAdmissiblePoint when |det J| falls below jacobian_eps scaled
    by the squared size of the top-view frame.
    """
    xu, yu, zu = jet.ru[..., 0], jet.ru[..., 1], jet.ru[..., 2]
    xv, yv, zv = jet.rv[..., 0], jet.rv[..., 1], jet.rv[..., 2]
    det = xu * yv - yu * xv
    scale = xu * xu + yu * yu + xv * xv + yv * yv
    eps = (JACOBIAN_EPS if jacobian_eps is None else jacobian_eps)
    if np.any(np.abs(det) <= eps * np.maximum(scale, 1e-300)):
        raise NonAdmissiblePoint("top-view Jacobian is singular: tangent plane is isotropic")

    fx = (zu * yv - yu * zv) / det
    fy = (xu * zv - zu * xv) / det

    def strip(second):
        return second[..., 2] - fx * second[..., 0] - fy * second[..., 1]

    puu, puv, pvv = strip(jet.ruu), strip(jet.ruv), strip(jet.rvv)
    # Hess = J^-1 Hp J^-T with J rows (xu, yu), (xv, yv).
    a11, a12 = yv / det, -yu / det
    a21, a22 = -xv / det, xu / det
    b11 = a11 * puu + a12 * puv
    b12 = a11 * puv + a12 * pvv
    b21 = a21 * puu + a22 * puv
    b22 = a21 * puv + a22 * pvv
    fxx = b11 * a11 + b12 * a12
    fxy = b11 * a21 + b12 * a22
    fyy = b21 * a21 + b22 * a22
    # fxy from either off-diagonal; they agree to rounding. Symmetrize.
    fxy = 0.5 * (fxy + (b21 * a11 + b22 * a12))
    return Jet2Height(
        x0=jet.r[..., 0], y0=jet.r[..., 1], f=jet.r[..., 2],
        fx=fx, fy=fy, fxx=fxx, fxy=fxy, fyy=fyy,
    )


def isotropic_curvatures(j: Jet2Height) -> IsoCurvature:
    """Eigen-decompose the Hessian into isotropic curvature data.

    k1 >= k2 always; each direction is normalized with its first
    nonvanishing component positive. At umbilics (|k1 - k2| below
    UMBILIC_RTOL relative to max(|k1|, |k2|, 1)) the directions fall back
    to the coordinate axes and the umbilic flag is set.
    """
    fxx = np.asarray(j.fxx, float)
    fyy = np.asarray(j.fyy, float)
    fxy = np.asarray(j.fxy, float)
    H = 0.5 * (fxx + fyy)
    K = fxx * fyy - fxy * fxy
    half_gap = np.hypot(0.5 * (fxx - fyy), fxy)
    k1 = H + half_gap
    k2 = H - half_gap
    umb = np.abs(k1 - k2) <= UMBILIC_RTOL * np.maximum(np.maximum(np.abs(k1), np.abs(k2)), 1.0)

    # Eigenvector for k1: (fxy, k1 - fxx) or (k1 - fyy, fxy), whichever is
    # better conditioned; umbilics get the x-axis.
    c1 = np.stack([np.broadcast_to(fxy, H.shape), k1 - fxx], axis=-1)
    c2 = np.stack([k1 - fyy, np.broadcast_to(fxy, H.shape)], axis=-1)
    pick = np.linalg.norm(c1, axis=-1) >= np.linalg.norm(c2, axis=-1)
    d1 = np.where(pick[..., None], c1, c2)
    n1 = np.linalg.norm(d1, axis=-1, keepdims=True)
    axis_x = np.zeros_like(d1)
    axis_x[..., 0] = 1.0
    degenerate = (n1[..., 0] == 0.0) | umb
    d1 = np.where(degenerate[..., None], axis_x, d1 / np.where(n1 == 0.0, 1.0, n1))
    d1 = _fix_sign(d1)
    d2 = np.stack([-d1[..., 1], d1[..., 0]], axis=-1)
    d2 = _fix_sign(d2)
    return IsoCurvature(H=H, K=K, k1=k1, k2=k2, d1=d1, d2=d2, umbilic=umb)


def _fix_sign(d: np.ndarray) -> np.ndarray:
    """Flip each direction so its first nonzero component is positive."""
    lead = np.where(np.abs(d[..., 0]) > 1e-14, d[..., 0], d[..., 1])
    return d * np.where(lead < 0, -1.0, 1.0)[..., None]


def euclidean_curvatures(j: Jet2Height):
    """Euclidean K, H and principal curvatures of the same Monge patch.

    Returns (K_e, H_e, k1_e, k2_e) with k1_e >= k2_e. Kept separate from
    the isotropic pipeline on purpose: several families satisfy curvature
    laws in one geometry only.
    """
    fx = np.asarray(j.fx, float)
    fy = np.asarray(j.fy, float)
    w2 = 1.0 + fx * fx + fy * fy
    w = np.sqrt(w2)
    K_e = (j.fxx * j.fyy - j.fxy ** 2) / (w2 * w2)
    H_e = ((1.0 + fx * fx) * j.fyy - 2.0 * fx * fy * j.fxy
           + (1.0 + fy * fy) * j.fxx) / (2.0 * w2 * w)
    disc = np.maximum(H_e * H_e - K_e, 0.0)
    root = np.sqrt(disc)
    return K_e, H_e, H_e + root, H_e - root


def crpc_target(a: float) -> float:
    """Value of H^2/K shared by all surfaces whose curvature ratio is a."""
    if a == 0:
        raise ValueError("ratio a must be nonzero")
    return (a + 1.0) ** 2 / (4.0 * a)


def crpc_residual(j: Jet2Height, a: float):
    """H^2/K - (a+1)^2/(4a); zero exactly on constant-ratio surfaces.

    The target is symmetric under a -> 1/a, matching the symmetry of the
    ratio condition (k1/k2 = a or k2/k1 = a). Raises DegenerateK when |K|
    is below K_EPS anywhere.
    """
    target = crpc_target(a)
    fxx = np.asarray(j.fxx, float)
    fyy = np.asarray(j.fyy, float)
    fxy = np.asarray(j.fxy, float)
    H = 0.5 * (fxx + fyy)
    K = fxx * fyy - fxy * fxy
    if np.any(np.abs(K) < K_EPS):
        raise DegenerateK("relative curvature K is numerically zero")
    return H * H / K - target


def normal_curvature(j: Jet2Height, t) -> np.ndarray | float:
    """Normal curvature t . Hess(f) . t along a unit top-view direction."""
    t = np.asarray(t, float)
    t1, t2 = t[..., 0], t[..., 1]
    return j.fxx * t1 * t1 + 2.0 * j.fxy * t1 * t2 + j.fyy * t2 * t2


def characteristic_directions(j: Jet2Height):
    """The two characteristic top-view directions at a non-degenerate point.

    For K < 0 these are the asymptotic directions (normal curvature zero).
    For K > 0 they are the conjugate pair symmetric with respect to the
    principal directions: t = cos(phi) d1 +- sin(phi) d2 with
    tan^2(phi) = k1/k2. Both cases come out of the same formula with
    tan^2(phi) = |k1/k2|.

    Returns (t_plus, t_minus), unit vectors of shape (..., 2).
    Raises Umbilic at umbilics and DegenerateK when K ~ 0.
    """
    c = isotropic_curvatures(j)
    if np.any(c.umbilic):
        raise Umbilic("characteristic directions undefined at an umbilic")
    if np.any(np.abs(np.asarray(c.K, float)) < K_EPS):
        raise DegenerateK("characteristic directions undefined where K = 0")
    ratio = np.abs(np.asarray(c.k1, float) / np.asarray(c.k2, float))
    phi = np.arctan(np.sqrt(ratio))
    cph, sph = np.cos(phi), np.sin(phi)
    # Build on the rigid frame (d1, rot90 d1): d2's own sign normalization
    # may flip relative to d1 between nearby points, which would silently
    # swap the +/- branches along a trace.
    d2r = np.stack([-c.d1[..., 1], c.d1[..., 0]], axis=-1)
    tp = cph[..., None] * c.d1 + sph[..., None] * d2r
    tm = cph[..., None] * c.d1 - sph[..., None] * d2r
    return tp, tm
