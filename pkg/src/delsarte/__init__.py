"""Lefschetz and Picard numbers of Delsarte surfaces."""

from .character_group import (
    CharacterGroup,
    CharacterVector,
    DelsarteMatrix,
    betti2,
    hodge11,
    is_maximal,
    lefschetz,
    picard,
)
from .exact_arith import RationalMod1
from .formula_table import QuasiPolynomial, load_table, verify_case
from .hodge_classes import HodgeClassLabel, classify, structural_lefschetz
from .surface_catalog import SymbolicSurface, classify_surfaces

__all__ = [
    "CharacterGroup", "CharacterVector", "DelsarteMatrix", "HodgeClassLabel", "QuasiPolynomial",
    "RationalMod1", "SymbolicSurface", "betti2", "classify", "classify_surfaces", "hodge11",
    "is_maximal", "lefschetz", "load_table", "picard", "structural_lefschetz", "verify_case",
]
