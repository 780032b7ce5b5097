"""Exact and numerical tools for the triangle map, its slow version and the tree of rational pairs."""
from .errors import ConfigurationError, DomainError, ResourceLimitError
from .exact_core import LexOrdering, Point2, RationalPair, StripPoint, lex_compare, make_pair, mediant, parse_pair

__all__ = [
    "ConfigurationError",
    "DomainError",
    "LexOrdering",
    "Point2",
    "RationalPair",
    "ResourceLimitError",
    "StripPoint",
    "lex_compare",
    "make_pair",
    "mediant",
    "parse_pair",
]
__version__ = "0.1.0"
