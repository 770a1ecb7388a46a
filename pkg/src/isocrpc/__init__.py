"""Constant principal-curvature-ratio surfaces in isotropic geometry.

Library layout:

- geometry: jets, isotropic/Euclidean curvatures, characteristic directions
- families: the catalog of exact surface families and similarity transforms
- curves: direction-field tracing, top-view angles, osculating circles,
  contact with parabolic spheres
- spheres: parabolic spheres, one-parameter families, envelope
  characteristics and channel-surface checks
- duality: the isotropic metric duality (polarity in the unit sphere)
- residuals: governing ODE / identity residuals used for verification
- meshing: masked grid sampling with per-vertex curvature channels
- cli: list / generate / verify / trace / dual subcommands
"""

from .families import FamilySpec, G8Element, apply_similarity, evaluate, family_ids, make_spec
from .geometry import (
    IsoCurvature,
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

__all__ = [
    "FamilySpec",
    "G8Element",
    "IsoCurvature",
    "Jet2Height",
    "ParamJet2",
    "apply_similarity",
    "characteristic_directions",
    "crpc_residual",
    "crpc_target",
    "euclidean_curvatures",
    "evaluate",
    "family_ids",
    "fd_jet",
    "height_jet_from_param",
    "isotropic_curvatures",
    "isotropic_norm",
    "make_spec",
    "normal_curvature",
    "point3",
    "unit_topdir",
]

__version__ = "0.1.0"
