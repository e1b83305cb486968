from .coordination import CoordinationProblem, Observation, SynthesisReport, TheoremApplied, synthesize
from .properties import PropertyVerdict, Witness
from .storage import GeneratorStore
from .synthesis import SynthesisInput, sup_c, sup_cn, sup_n
from .tracing import NullTimer, StageTimer

__all__ = [
    "CoordinationProblem",
    "GeneratorStore",
    "NullTimer",
    "Observation",
    "PropertyVerdict",
    "StageTimer",
    "SynthesisInput",
    "SynthesisReport",
    "TheoremApplied",
    "Witness",
    "sup_c",
    "sup_cn",
    "sup_n",
    "synthesize",
]
