from .kl import KLTable, kl_table, poly_str
from .smooth import Refusal, SelfDualityReport, SmoothLocusReport, is_palindromic, self_duality_check, smooth_locus
from .tilting import CharacterTable, sl2_tilting_oracle, tilting_character
from .torsion import torsion_audit

__all__ = [
    "KLTable",
    "kl_table",
    "poly_str",
    "Refusal",
    "SelfDualityReport",
    "SmoothLocusReport",
    "is_palindromic",
    "self_duality_check",
    "smooth_locus",
    "CharacterTable",
    "sl2_tilting_oracle",
    "tilting_character",
    "torsion_audit",
]
