"""Exact toolkit for smooth complete toric fans and their crepant contractions."""

from .errors import TorifanError
from .fan import Fan, build_fan, isomorphism, load_fan
from .mori import Positivity, crepant_relations, positivity_class, primitive_relations
from .special import special_report

__version__ = "0.1.0"

__all__ = [
    "Fan",
    "Positivity",
    "TorifanError",
    "build_fan",
    "crepant_relations",
    "isomorphism",
    "load_fan",
    "positivity_class",
    "primitive_relations",
    "special_report",
]
