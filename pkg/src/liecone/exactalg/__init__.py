"""Exact integer/rational linear algebra, certified roots and number fields."""

from .matrix import ExactMatrix, char_poly, commutator, det, exterior_power
from .numfield import QQ, NFElement, NumberField, compositum, field_of, gaussian_field
from .poly import cyclotomic, cyclotomic_split, is_cyclotomic_product
from .roots import (
    AlgebraicValue,
    RationalInterval,
    RefinementFailed,
    isolate_roots,
    max_modulus_root,
)
from .subspace import (
    RationalSubspace,
    Subspace,
    eigenspace,
    fixed_space,
    intersect,
    kernel,
    largest_invariant_subspace,
    rref,
)

__all__ = [
    "AlgebraicValue",
    "ExactMatrix",
    "NFElement",
    "NumberField",
    "QQ",
    "RationalInterval",
    "RationalSubspace",
    "RefinementFailed",
    "Subspace",
    "char_poly",
    "commutator",
    "compositum",
    "cyclotomic",
    "cyclotomic_split",
    "det",
    "eigenspace",
    "exterior_power",
    "field_of",
    "fixed_space",
    "gaussian_field",
    "intersect",
    "is_cyclotomic_product",
    "isolate_roots",
    "kernel",
    "largest_invariant_subspace",
    "max_modulus_root",
    "rref",
]
