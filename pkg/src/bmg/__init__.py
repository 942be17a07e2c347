"""Braden-MacPherson sheaves on moment graphs, with exact coefficients."""

__version__ = "0.1.0"

from .scalars import QQ, PLocalIntegers, PrimeField, Rationals, parse_coeff
from .lattice import Lattice, LinearForm, Weight
from .graph import MomentGraph, VertexSet, gkm_check, validate
from .builders import CartanMatrix, WeylGroup, affine_grassmannian_graph, finite_bruhat_graph
from .engine import (
    BMSheaf,
    braden_macpherson,
    costalk,
    decompose,
    direct_sum_sheaves,
    global_sections_polynomial,
    sections,
    shift_sheaf,
    verify_bm_axioms,
)

__all__ = [
    "QQ",
    "Rationals",
    "PrimeField",
    "PLocalIntegers",
    "parse_coeff",
    "Lattice",
    "Weight",
    "LinearForm",
    "MomentGraph",
    "VertexSet",
    "validate",
    "gkm_check",
    "CartanMatrix",
    "WeylGroup",
    "finite_bruhat_graph",
    "affine_grassmannian_graph",
    "BMSheaf",
    "braden_macpherson",
    "sections",
    "costalk",
    "verify_bm_axioms",
    "global_sections_polynomial",
    "shift_sheaf",
    "direct_sum_sheaves",
    "decompose",
]
