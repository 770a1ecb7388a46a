"""Grid sampling of family charts with singularity masking, plus OBJ export.

Grids are uniform in the chart parameters. Nodes are masked (excluded)
when they leave the hard validity region, come within the singular margin
of a locus, produce non-finite jet data, or have a numerically vertical
tangent plane. Quads are emitted only when all four corners survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGrid
from .families import (
    SINGULAR_MARGIN,
    FamilySpec,
    evaluate,
    hard_valid,
    ratio_for_residual,
    ratio_kind,
    singular_distance,
)
from .geometry import JACOBIAN_EPS, K_EPS, crpc_target

_FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return _FLOAT_FMT % x


@dataclass(frozen=True)
class MeshGrid:
    """Sampled chart: nodes, mask, and per-node curvature channels.

    mask is True where a node is EXCLUDED. H and K are NaN at masked
    nodes; residual is the family's ratio-law residual (isotropic
    curvature-ratio residual, or the Euclidean principal-ratio residual
    for the Euclidean comparison entry) and None when no ratio applies.
    """

    spec: FamilySpec
    us: np.ndarray  # (nu,)
    vs: np.ndarray  # (nv,)
    vertices: np.ndarray  # (nu, nv, 3)
    mask: np.ndarray  # (nu, nv) bool, True = excluded
    H: np.ndarray
    K: np.ndarray
    residual: np.ndarray | None

    @property
    def nu(self) -> int:
        return len(self.us)

    @property
    def nv(self) -> int:
        return len(self.vs)

    def vertex_rows(self) -> np.ndarray:
        """Unmasked vertices, row-major in (u, v)."""
        return self.vertices[~self.mask]

    def quad_indices(self) -> np.ndarray:
        """(m, 4) one-based indices into vertex_rows(), one row per whole quad."""
        idx = np.full((self.nu, self.nv), -1, dtype=int)
        idx[~self.mask] = np.arange(int((~self.mask).sum()))
        quads = []
        for i in range(self.nu - 1):
            for j in range(self.nv - 1):
                c = (idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1])
                if all(k >= 0 for k in c):
                    quads.append([k + 1 for k in c])
        return np.array(quads, dtype=int).reshape(-1, 4)

    def stats(self) -> dict:
        valid = ~self.mask
        out = {
            "n_nodes": int(self.mask.size),
            "n_masked": int(self.mask.sum()),
            "n_valid": int(valid.sum()),
            "n_quads": int(len(self.quad_indices())),
            "max_abs_H": float(np.max(np.abs(self.H[valid]))) if valid.any() else float("nan"),
            "max_abs_K": float(np.max(np.abs(self.K[valid]))) if valid.any() else float("nan"),
        }
        if self.residual is not None and valid.any():
            out["max_abs_residual"] = float(np.nanmax(np.abs(self.residual[valid])))
        return out


def sample_grid(
    spec: FamilySpec,
    nu: int,
    nv: int,
    margin: float = SINGULAR_MARGIN,
    a: float | None = None,
) -> MeshGrid:
    """Sample an nu-by-nv grid over spec.domain with singularity masking.

    `a` overrides the ratio hypothesis behind the residual channel; by
    default the family's own ratio is checked.
    """
    if nu < 2 or nv < 2:
        raise ValueError("grid needs at least 2 samples per direction")
    u0, u1, v0, v1 = spec.domain
    us = np.linspace(u0, u1, nu)
    vs = np.linspace(v0, v1, nv)
    U, V = np.meshgrid(us, vs, indexing="ij")
    with np.errstate(all="ignore"):
        jet = evaluate(spec, U, V, check=False)
        bad = ~np.asarray(hard_valid(spec, U, V), bool)
        bad |= np.asarray(singular_distance(spec, U, V), float) < margin
        for arr in (jet.r, jet.ru, jet.rv, jet.ruu, jet.ruv, jet.rvv):
            bad |= ~np.all(np.isfinite(arr), axis=-1)

        xu, yu = jet.ru[..., 0], jet.ru[..., 1]
        xv, yv = jet.rv[..., 0], jet.rv[..., 1]
        det = xu * yv - yu * xv
        scale = np.maximum(np.abs(xu) + np.abs(yu), np.abs(xv) + np.abs(yv)) ** 2
        bad |= ~np.isfinite(det)
        bad |= np.abs(det) < JACOBIAN_EPS * np.maximum(1.0, scale)

        # height-jet Hessian through the top-view Jacobian (Monge form)
        fx = np.where(bad, np.nan, (jet.ru[..., 2] * yv - jet.rv[..., 2] * yu) / det)
        fy = np.where(bad, np.nan, (xu * jet.rv[..., 2] - xv * jet.ru[..., 2]) / det)
        huu = jet.ruu[..., 2] - fx * jet.ruu[..., 0] - fy * jet.ruu[..., 1]
        huv = jet.ruv[..., 2] - fx * jet.ruv[..., 0] - fy * jet.ruv[..., 1]
        hvv = jet.rvv[..., 2] - fx * jet.rvv[..., 0] - fy * jet.rvv[..., 1]
        # Hess = J^-T Hp J^-1 with Hp the chart-parameter Hessian of the height
        a11 = (yv * (yv * huu - yu * huv) - yu * (yv * huv - yu * hvv)) / (det * det)
        a12 = (-xv * (yv * huu - yu * huv) + xu * (yv * huv - yu * hvv)) / (det * det)
        a22 = (-xv * (-xv * huu + xu * huv) + xu * (-xv * huv + xu * hvv)) / (det * det)
        H = 0.5 * (a11 + a22)
        K = a11 * a22 - a12 * a12
        bad |= ~(np.isfinite(H) & np.isfinite(K))

        if bad.all():
            raise EmptyGrid(f"{spec.family_id}: every grid node is masked")

        if a is None:
            a = ratio_for_residual(spec)
        residual: np.ndarray | None
        if ratio_kind(spec) == "euclidean":
            fz = 1.0 + fx * fx + fy * fy
            Ke = K / (fz * fz)
            He = ((1.0 + fx * fx) * a22 - 2.0 * fx * fy * a12
                  + (1.0 + fy * fy) * a11) / (2.0 * fz * np.sqrt(fz))
            root = np.sqrt(np.maximum(He * He - Ke, 0.0))
            k1e, k2e = He + root, He - root
            sc = np.maximum(1.0, np.maximum(np.abs(k1e), np.abs(k2e)))
            residual = np.minimum(np.abs(k1e - a * k2e), np.abs(k2e - a * k1e)) / sc
        else:
            residual = np.where(np.abs(K) < K_EPS, np.nan, H * H / K - crpc_target(a))
        residual = np.where(bad, np.nan, residual)

    H = np.where(bad, np.nan, H)
    K = np.where(bad, np.nan, K)
    return MeshGrid(spec=spec, us=us, vs=vs, vertices=np.asarray(jet.r, float),
                    mask=bad, H=H, K=K, residual=residual)


def obj_text(grid: MeshGrid) -> str:
    """Wavefront OBJ text: unmasked vertices row-major, whole quads as faces."""
    lines = []
    for p in grid.vertex_rows():
        lines.append("v " + " ".join(_fmt(c) for c in p))
    for q in grid.quad_indices():
        lines.append("f %d %d %d %d" % tuple(q))
    return "\n".join(lines) + "\n"


def write_obj(grid: MeshGrid, path) -> None:
    text = obj_text(grid)
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
