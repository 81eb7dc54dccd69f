"""Quadratic forms over finite fields and their representation graphs."""

from .gf import FieldElement, FieldSpec, SquareClass, field_of_order, make_field, parse_field_spec
from .qform import QuadraticForm, classify, parse_form

__all__ = [
    "FieldElement",
    "FieldSpec",
    "SquareClass",
    "QuadraticForm",
    "classify",
    "field_of_order",
    "make_field",
    "parse_field_spec",
    "parse_form",
]

__version__ = "0.1.0"
