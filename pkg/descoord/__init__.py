"""Relaxed coordination control synthesis for modular discrete-event systems."""

from descoord.automata import Alphabet, Generator, ProjectionSpec
from descoord.services.coordination import (
    CoordinationProblem,
    Observation,
    SynthesisReport,
    build_coordinator,
    synthesize,
)

__all__ = [
    "Alphabet",
    "CoordinationProblem",
    "Generator",
    "Observation",
    "ProjectionSpec",
    "SynthesisReport",
    "build_coordinator",
    "synthesize",
]
