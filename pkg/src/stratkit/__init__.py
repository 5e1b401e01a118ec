"""Exact analysis of polynomial maps: critical values, asymptotic sets and
stratifications of their union."""

from .polycore import (
    GREVLEX, LEX, MonomialOrder, PolyMap, PolyMatrix, Polynomial, VariableContext, block_order,
    determinant, jacobian, leading_form, homogenize, dehomogenize, minors_ideal,
)
from .ideals import (
    GroebnerBasis, Ideal, ResourceLimitError, dimension, eliminate, groebner, ideal_containment,
    intersect, member, normal_form, radical_member, saturate, step_budget,
)
from .csets import CSet, Piece, is_pure_dimensional
from .parsing import MapParseError, parse_map, render_map

__all__ = [
    "GREVLEX", "LEX", "MonomialOrder", "PolyMap", "PolyMatrix", "Polynomial", "VariableContext",
    "block_order", "determinant", "jacobian", "leading_form", "homogenize", "dehomogenize",
    "minors_ideal", "GroebnerBasis", "Ideal", "ResourceLimitError", "dimension", "eliminate",
    "groebner", "ideal_containment", "intersect", "member", "normal_form", "radical_member",
    "saturate", "step_budget", "CSet", "Piece", "is_pure_dimensional", "MapParseError",
    "parse_map", "render_map",
]
