"""Polyhedral and Lorentzian cones with exact membership and restriction."""

from .core import (
    ConeError,
    ConeHandle,
    LorentzianCone,
    PolyhedralCone,
    contains,
    embed_cone,
    first_point,
    is_nonzero,
    is_strictly_convex,
    preserves,
    restrict,
    signature,
    span_of,
)
from .dd import NotPointed, extreme_rays, normalize_ray
from .lp import nonneg_solution

__all__ = [
    "ConeError",
    "ConeHandle",
    "LorentzianCone",
    "NotPointed",
    "PolyhedralCone",
    "contains",
    "embed_cone",
    "extreme_rays",
    "first_point",
    "is_nonzero",
    "is_strictly_convex",
    "nonneg_solution",
    "normalize_ray",
    "preserves",
    "restrict",
    "signature",
    "span_of",
]
