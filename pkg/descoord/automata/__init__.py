"""Deterministic finite generators and the regular-language algebra over them."""

from .models import Alphabet, EventId, Generator, ProjectionSpec, State, Word
from .operations import (
    LanguageComparison,
    accepts,
    accessible,
    coaccessible,
    determinize_projection,
    difference,
    empty_generator,
    enumerate_bounded,
    from_words,
    generates,
    intersect,
    is_nonblocking,
    is_trim,
    language_equal,
    language_subset,
    lift,
    mark_all,
    marked_words,
    normalize,
    prefix_closure,
    project,
    project_onto,
    shortest_marked_word,
    shortest_words,
    sync_product,
    sync_product_all,
    trim,
    union,
    universal_generator,
)

__all__ = [
    "Alphabet",
    "EventId",
    "Generator",
    "LanguageComparison",
    "ProjectionSpec",
    "State",
    "Word",
    "accepts",
    "accessible",
    "coaccessible",
    "determinize_projection",
    "difference",
    "empty_generator",
    "enumerate_bounded",
    "from_words",
    "generates",
    "intersect",
    "is_nonblocking",
    "is_trim",
    "language_equal",
    "language_subset",
    "lift",
    "mark_all",
    "marked_words",
    "normalize",
    "prefix_closure",
    "project",
    "project_onto",
    "shortest_marked_word",
    "shortest_words",
    "sync_product",
    "sync_product_all",
    "trim",
    "union",
    "universal_generator",
]
