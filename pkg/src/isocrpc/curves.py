"""Curve tracing and second-order contact machinery.

Traces live in the chart's (u, v) parameter plane: the chosen unit
top-view direction field is pulled back through the top-view Jacobian and
integrated with fixed-step RK4, so surface membership never has to be
re-solved. Osculating isotropic circles, the tangent-sphere contact check,
and least-squares sphere fits of traced curves complete the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateFit,
    DegenerateJet,
    GeometryError,
    InflectionPoint,
    NoIntersection,
    Umbilic,
    UmbilicEncountered,
    ZeroNormalCurvature,
)
from .families import FamilySpec, evaluate
from .geometry import (
    K_EPS,
    Jet2Height,
    characteristic_directions,
    height_jet_from_param,
    isotropic_curvatures,
    normal_curvature,
)
from .spheres import CYLINDRIC, ELLIPTIC, PARABOLIC, ParabolicSphere, tangent_sphere

TRACE_KINDS = ("characteristic+", "characteristic-", "principal1", "principal2")

_FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return _FLOAT_FMT % x


@dataclass(frozen=True)
class CurveTrace:
    """Sampled curve on a surface: parameter values, points, top-view tangents.

    t is cumulative top-view arclength (the integrated field has unit
    top-view speed). uv carries the parameter-plane path when the trace
    came from a chart; stopped records why integration ended early.
    """

    kind: str
    t: np.ndarray  # (n,)
    uv: np.ndarray | None  # (n, 2) or None
    points: np.ndarray  # (n, 3)
    top_dirs: np.ndarray  # (n, 2)
    stopped: str | None = None

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, path) -> None:
        """Write t,x,y,z,tx,ty rows at 17 significant digits."""
        rows = ["t,x,y,z,tx,ty"]
        for i in range(len(self.t)):
            rows.append(",".join(_fmt(v) for v in (
                self.t[i],
                self.points[i, 0], self.points[i, 1], self.points[i, 2],
                self.top_dirs[i, 0], self.top_dirs[i, 1],
            )))
        text = "\n".join(rows) + "\n"
        if hasattr(path, "write"):
            path.write(text)
        else:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)


def _field_direction(spec: FamilySpec, u: float, v: float, kind: str, ref):
    """Unit top-view direction of the chosen field, sign-aligned with ref."""
    jet = evaluate(spec, u, v, check=True)
    hj = height_jet_from_param(jet)
    if kind in ("characteristic+", "characteristic-"):
        tp, tm = characteristic_directions(hj)
        d = tp if kind == "characteristic+" else tm
    else:
        cur = isotropic_curvatures(hj)
        if bool(np.any(cur.umbilic)):
            raise Umbilic("principal directions undefined at an umbilic")
        d = cur.d1 if kind == "principal1" else cur.d2
    d = np.asarray(d, float).reshape(2)
    if ref is not None and float(d @ ref) < 0.0:
        d = -d
    return d, jet


def _lift(jet, d):
    # parameter velocity with top view exactly d: solve J [du dv]^T = d
    xu, yu = float(jet.ru[0]), float(jet.ru[1])
    xv, yv = float(jet.rv[0]), float(jet.rv[1])
    det = xu * yv - yu * xv
    return np.array([(d[0] * yv - d[1] * xv) / det, (xu * d[1] - yu * d[0]) / det])


def trace_direction_field(
    spec: FamilySpec,
    seed: tuple[float, float],
    kind: str,
    steps: int,
    dt: float,
) -> CurveTrace:
    """Integrate the chosen direction field from seed with fixed-step RK4.

    The direction sign at every stage is chosen for continuity against the
    step's starting direction. A singularity, domain exit, or umbilic hit
    after the first sample truncates the trace (stopped says why); at the
    seed itself an umbilic raises UmbilicEncountered and other geometry
    errors propagate.
    """
    if kind not in TRACE_KINDS:
        raise ValueError(f"kind must be one of {TRACE_KINDS}")
    if steps < 1 or dt <= 0.0:
        raise ValueError("steps must be >= 1 and dt > 0")
    u, v = float(seed[0]), float(seed[1])
    try:
        d0, jet0 = _field_direction(spec, u, v, kind, None)
    except Umbilic as exc:
        raise UmbilicEncountered(str(exc)) from exc

    ts = [0.0]
    uvs = [(u, v)]
    pts = [np.asarray(jet0.r, float).reshape(3)]
    dirs = [d0]
    stopped = None
    ref = d0
    for i in range(steps):
        try:
            def rhs(uu, vv):
                d, _ = _field_direction(spec, uu, vv, kind, ref)
                return _lift(evaluate(spec, uu, vv, check=False), d)

            k1 = rhs(u, v)
            k2 = rhs(u + 0.5 * dt * k1[0], v + 0.5 * dt * k1[1])
            k3 = rhs(u + 0.5 * dt * k2[0], v + 0.5 * dt * k2[1])
            k4 = rhs(u + dt * k3[0], v + dt * k3[1])
            du, dv = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            u, v = u + du, v + dv
            d, jet = _field_direction(spec, u, v, kind, ref)
        except GeometryError as exc:
            stopped = f"{type(exc).__name__}: {exc}"
            break
        if not (math.isfinite(u) and math.isfinite(v)):
            stopped = "non-finite parameter state"
            break
        ref = d
        ts.append((i + 1) * dt)
        uvs.append((u, v))
        pts.append(np.asarray(jet.r, float).reshape(3))
        dirs.append(d)
    return CurveTrace(
        kind=kind,
        t=np.array(ts),
        uv=np.array(uvs),
        points=np.array(pts),
        top_dirs=np.array(dirs),
        stopped=stopped,
    )


def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _segment_crossing(p0, p1, q0, q1, tol=1e-10):
    """Intersection point of two top-view segments, or None.

    Candidate pairs are detected by endpoint side tests; the location is
    then refined by bisection on the signed cross product along [p0, p1].
    """
    w = q1 - q0
    s0 = _cross2(w, p0 - q0)
    s1 = _cross2(w, p1 - q0)
    if s0 == 0.0 and s1 == 0.0:
        return None  # collinear: no transversal crossing
    if (s0 > 0 and s1 > 0) or (s0 < 0 and s1 < 0):
        return None
    u = p1 - p0
    r0 = _cross2(u, q0 - p0)
    r1 = _cross2(u, q1 - p0)
    if (r0 > 0 and r1 > 0) or (r0 < 0 and r1 < 0):
        return None
    lo, hi, flo = 0.0, 1.0, s0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = _cross2(w, p0 + mid * (p1 - p0) - q0)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return p0 + s * (p1 - p0)


def included_angle_topview(c1: CurveTrace, c2: CurveTrace) -> float:
    """Top-view line angle (in [0, pi/2]) where the two traces cross.

    Uses the recorded field directions at the samples bracketing the first
    crossing; traces sharing their seed intersect there. Raises
    NoIntersection when the top views never cross.
    """
    a1 = np.asarray(c1.points[:, :2], float)
    a2 = np.asarray(c2.points[:, :2], float)

    def line_angle(d1, d2) -> float:
        c = abs(float(np.dot(d1, d2))) / (
            np.linalg.norm(d1) * np.linalg.norm(d2)
        )
        return math.acos(min(1.0, max(-1.0, c)))

    if np.linalg.norm(a1[0] - a2[0]) < 1e-12:
        return line_angle(c1.top_dirs[0], c2.top_dirs[0])
    for i in range(len(a1) - 1):
        for j in range(len(a2) - 1):
            hit = _segment_crossing(a1[i], a1[i + 1], a2[j], a2[j + 1])
            if hit is not None:
                return line_angle(c1.top_dirs[i], c2.top_dirs[j])
    raise NoIntersection("trace top views do not cross")


@dataclass(frozen=True)
class CurveJet:
    """Second-order data of a spatial curve: point, velocity, acceleration."""

    point: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @staticmethod
    def of(point, d1, d2) -> "CurveJet":
        p = np.asarray(point, float).reshape(3)
        v = np.asarray(d1, float).reshape(3)
        a = np.asarray(d2, float).reshape(3)
        if not np.all(np.isfinite([p, v, a])):
            raise DegenerateJet("curve jet has non-finite entries")
        return CurveJet(p, v, a)


def curve_jet_on_surface(
    spec: FamilySpec,
    p: tuple[float, float],
    dp: tuple[float, float],
    ddp: tuple[float, float] = (0.0, 0.0),
) -> CurveJet:
    """2-jet of the surface curve s -> r(u(s), v(s)) given parameter jets."""
    jet = evaluate(spec, p[0], p[1], check=True)
    up, vp = float(dp[0]), float(dp[1])
    upp, vpp = float(ddp[0]), float(ddp[1])
    c1 = jet.ru * up + jet.rv * vp
    c2 = (jet.ruu * up * up + 2.0 * jet.ruv * up * vp + jet.rvv * vp * vp
          + jet.ru * upp + jet.rv * vpp)
    return CurveJet.of(jet.r, c1, c2)


@dataclass(frozen=True)
class OsculatingCircle:
    """Osculating isotropic circle of a curve 2-jet.

    kind "elliptic": carrier is the non-isotropic plane z = px+qy+s
    (carrier_plane=(p,q,s)) over the top-view circle (center, top_radius).
    kind "parabolic": carrier_plane=(n1,n2,d) is the isotropic plane
    n1 x + n2 y + d = 0 and carrier_sphere a parabolic sphere containing
    the parabola (vertex data from the jet). kind "cylindric": vertical
    tangent; carrier_plane is an isotropic plane through the point and the
    parameterization degenerates to the vertical line.
    """

    kind: str
    contact_point: np.ndarray
    carrier_plane: tuple[float, float, float]
    carrier_sphere: ParabolicSphere | None
    center: tuple[float, float] | None
    top_radius: float | None
    points: np.ndarray  # (n, 3) samples of the circle

    def algebraic_residual_on(self, sphere: ParabolicSphere) -> float:
        return float(np.max(np.abs(sphere.algebraic_residual(self.points))))


def osculating_isotropic_circle(
    jet: CurveJet,
    curvature_tol: float = 1e-10,
    n_samples: int = 64,
    half_span: float = 1.0,
) -> OsculatingCircle:
    """The isotropic circle in second-order contact with the jet.

    Elliptic when the top view genuinely curves, parabolic when the top
    view is straight but the height accelerates, cylindric when the
    tangent is vertical. A straight-line jet has no circle and raises
    InflectionPoint.
    """
    c, cp, cpp = jet.point, jet.d1, jet.d2
    tp = cp[:2]
    v = float(np.linalg.norm(tp))
    speed3 = float(np.linalg.norm(cp))
    if speed3 < 1e-14:
        raise DegenerateJet("curve is irregular at the point (zero velocity)")

    if v < 1e-12 * speed3:
        # vertical tangent: cylindric case
        w = cpp[:2]
        nw = float(np.linalg.norm(w))
        if nw > 1e-14:
            n1, n2 = -w[1] / nw, w[0] / nw
        else:
            n1, n2 = 1.0, 0.0
        d = -(n1 * c[0] + n2 * c[1])
        z = c[2] + np.linspace(-half_span, half_span, n_samples)
        pts = np.stack([np.full(n_samples, c[0]), np.full(n_samples, c[1]), z], -1)
        return OsculatingCircle(
            kind=CYLINDRIC, contact_point=c, carrier_plane=(n1, n2, d),
            carrier_sphere=None, center=(float(c[0]), float(c[1])),
            top_radius=0.0, points=pts,
        )

    kappa_top = _cross2(tp, cpp[:2]) / v ** 3
    if abs(kappa_top) >= curvature_tol:
        # elliptic: contact equations for the carrier plane z = px+qy+s
        det = _cross2(tp, cpp[:2])
        p = (cp[2] * cpp[1] - cpp[2] * cp[1]) / det
        q = (cpp[2] * cp[0] - cp[2] * cpp[0]) / det
        s = c[2] - p * c[0] - q * c[1]
        That = tp / v
        nhat = np.array([-That[1], That[0]])
        center = c[:2] + nhat / kappa_top
        rho = 1.0 / abs(kappa_top)
        theta = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
        x = center[0] + rho * np.cos(theta)
        y = center[1] + rho * np.sin(theta)
        z = p * x + q * y + s
        return OsculatingCircle(
            kind=ELLIPTIC, contact_point=c, carrier_plane=(p, q, s),
            carrier_sphere=None, center=(float(center[0]), float(center[1])),
            top_radius=rho, points=np.stack([x, y, z], -1),
        )

    # straight top view: height z as a function of top-view arclength
    z1 = cp[2] / v
    z2 = (cpp[2] * v * v - cp[2] * float(tp @ cpp[:2])) / v ** 4
    if abs(z2) < curvature_tol:
        raise InflectionPoint("jet is straight to second order; no circle")
    That = tp / v
    sigma = np.linspace(-half_span, half_span, n_samples)
    x = c[0] + That[0] * sigma
    y = c[1] + That[1] * sigma
    z = c[2] + z1 * sigma + 0.5 * z2 * sigma * sigma
    n1, n2 = -That[1], That[0]
    d = -(n1 * c[0] + n2 * c[1])
    A = z2
    B = 2.0 * (z1 * That[0] - A * c[0])
    C = 2.0 * (z1 * That[1] - A * c[1])
    D = 2.0 * c[2] - A * (c[0] ** 2 + c[1] ** 2) - B * c[0] - C * c[1]
    return OsculatingCircle(
        kind=PARABOLIC, contact_point=c, carrier_plane=(n1, n2, d),
        carrier_sphere=ParabolicSphere(A, B, C, D), center=None,
        top_radius=None, points=np.stack([x, y, z], -1),
    )


def meusnier_check(
    spec: FamilySpec,
    p: tuple[float, float],
    T,
    curves: Sequence[CurveJet],
) -> float:
    """Max residual of the curves' osculating circles against the tangent sphere.

    All curves must touch the surface at p with top-view tangent T. Their
    osculating isotropic circles are predicted to lie on the parabolic
    sphere of radius 1/kappa_n(T) tangent to the surface there; the return
    value is the worst algebraic sphere residual over the sampled circles.
    """
    jet = evaluate(spec, p[0], p[1], check=True)
    hj: Jet2Height = height_jet_from_param(jet)
    t = np.asarray(T, float).reshape(2)
    t = t / np.linalg.norm(t)
    kn = float(normal_curvature(hj, t))
    if abs(kn) < K_EPS:
        raise ZeroNormalCurvature("tangent sphere undefined along an asymptotic direction")
    sphere = tangent_sphere(hj, 1.0 / kn)
    worst = 0.0
    for cj in curves:
        circ = osculating_isotropic_circle(cj)
        worst = max(worst, circ.algebraic_residual_on(sphere))
    return worst


def sphere_membership(curve: CurveTrace) -> tuple[ParabolicSphere, float]:
    """Least-squares parabolic sphere through a trace, with max residual.

    Fits (A, B, C, D) in 2z = A(x^2+y^2) + Bx + Cy + D over all samples.
    Raises DegenerateFit for fewer than 4 samples or a flat fit (|A| ~ 0).
    """
    pts = np.asarray(curve.points, float)
    if pts.shape[0] < 4:
        raise DegenerateFit("need at least 4 samples to fit a sphere")
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    M = np.stack([x * x + y * y, x, y, np.ones_like(x)], axis=-1)
    coef, *_ = np.linalg.lstsq(M, 2.0 * z, rcond=None)
    if abs(coef[0]) <= 1e-10:
        raise DegenerateFit("fitted sphere degenerates to a plane")
    sphere = ParabolicSphere(*map(float, coef))
    residual = float(np.max(np.abs(sphere.algebraic_residual(pts))))
    return sphere, residual
