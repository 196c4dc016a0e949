"""skone: exact-arithmetic toolkit for SK1 invariants of central simple algebras."""

from .fields import (
    FieldElement,
    FieldTower,
    FiniteField,
    LaurentExt,
    PAdicDescriptor,
    Rationals,
    RootAdjunction,
    is_nth_power,
    laurent_split,
    parse_field,
    primitive_root_of_unity,
)

__all__ = [
    "FieldElement",
    "FieldTower",
    "FiniteField",
    "LaurentExt",
    "PAdicDescriptor",
    "Rationals",
    "RootAdjunction",
    "is_nth_power",
    "laurent_split",
    "parse_field",
    "primitive_root_of_unity",
]

__version__ = "0.1.0"
