"""Pydantic models describing command reports, plus the plain-text renderings."""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from descoord.automata import Generator, marked_words
from descoord.genfile import serialize_generator
from descoord.services.coordination import SufficientConditionReport, SynthesisReport
from descoord.services.properties import PropertyVerdict


class WitnessModel(BaseModel):
    words: List[List[str]] = Field(..., description="Counterexample words, one event list each.")
    event: Optional[str] = Field(None, description="Offending event, when the property names one.")


class VerdictModel(BaseModel):
    property: str = Field(..., description="Name of the checked property.")
    holds: bool
    side: Optional[int] = Field(None, description="Subsystem (1 or 2) the verdict refers to.")
    detail: str = ""
    witness: Optional[WitnessModel] = None


class GeneratorModel(BaseModel):
    name: str = ""
    states: int = Field(..., description="Number of states.")
    text: str = Field(..., description="Generator serialized in the .gen format.")


class SupervisorModel(BaseModel):
    result: GeneratorModel
    lm_closed: VerdictModel = Field(..., description="Whether the result is L_m(plant)-closed.")


class SufficientConditionsModel(BaseModel):
    global_route: List[VerdictModel] = Field(default_factory=list)
    lifted_route: List[VerdictModel] = Field(default_factory=list)
    predicts_supremal: bool


class SynthesisReportModel(BaseModel):
    sigma_k: List[str] = Field(..., description="Coordinator alphabet.")
    observation: str
    coordinator: GeneratorModel
    local_specs: List[GeneratorModel] = Field(default_factory=list)
    local_supervisors: List[GeneratorModel] = Field(default_factory=list)
    nonconflicting: VerdictModel
    pk_intersection: Optional[GeneratorModel] = None
    pk_condition: Optional[VerdictModel] = None
    posterior_supervisor: Optional[GeneratorModel] = Field(
        None, description="Coordinator supervisor computed when the coordinator-level check fails."
    )
    posterior_nonconflicting: List[VerdictModel] = Field(default_factory=list)
    distributed_matches: Optional[bool] = None
    result: Optional[GeneratorModel] = Field(None, description="Closed-loop language M.")
    supremal: bool = False
    theorem_applied: str = "none"
    timings: Dict[str, float] = Field(default_factory=dict)
    conditions: Optional[SufficientConditionsModel] = Field(
        None, description="Sufficient-condition verdicts, when requested."
    )


def verdict_model(verdict: PropertyVerdict) -> VerdictModel:
    witness = None
    if verdict.witness is not None:
        witness = WitnessModel(
            words=[list(word) for word in verdict.witness.words], event=verdict.witness.event
        )
    return VerdictModel(
        property=verdict.property,
        holds=verdict.holds,
        side=verdict.side,
        detail=verdict.detail,
        witness=witness,
    )


def generator_model(generator: Generator) -> GeneratorModel:
    return GeneratorModel(
        name=generator.name, states=len(generator), text=serialize_generator(generator)
    )


def _optional_generator(generator: Optional[Generator]) -> Optional[GeneratorModel]:
    return generator_model(generator) if generator is not None else None


def synthesis_report_model(
    report: SynthesisReport, conditions: Optional[SufficientConditionReport] = None
) -> SynthesisReportModel:
    return SynthesisReportModel(
        sigma_k=sorted(report.problem.sigma_k),
        observation=report.problem.observation.value,
        coordinator=generator_model(report.coordinator),
        local_specs=[generator_model(g) for g in report.local_specs],
        local_supervisors=[generator_model(g) for g in report.local_supervisors],
        nonconflicting=verdict_model(report.nonconflicting),
        pk_intersection=_optional_generator(report.pk_intersection),
        pk_condition=verdict_model(report.pk_condition) if report.pk_condition is not None else None,
        posterior_supervisor=_optional_generator(report.posterior_supervisor),
        posterior_nonconflicting=[verdict_model(v) for v in report.posterior_nonconflicting],
        distributed_matches=report.distributed_matches,
        result=_optional_generator(report.result),
        supremal=report.supremal,
        theorem_applied=report.theorem_applied.value,
        timings=dict(report.timings),
        conditions=sufficient_conditions_model(conditions) if conditions is not None else None,
    )


def sufficient_conditions_model(report: SufficientConditionReport) -> SufficientConditionsModel:
    return SufficientConditionsModel(
        global_route=[verdict_model(v) for v in report.global_route],
        lifted_route=[verdict_model(v) for v in report.lifted_route],
        predicts_supremal=report.predicts_supremal,
    )


def render_verdict(verdict: PropertyVerdict) -> str:
    side = f" [side {verdict.side}]" if verdict.side is not None else ""
    status = "holds" if verdict.holds else "FAILS"
    text = f"{verdict.property}{side}: {status}"
    if verdict.witness is not None:
        text += f" witness {verdict.witness.describe()}"
    if verdict.detail:
        text += f" ({verdict.detail})"
    return text


def render_language(generator: Generator, limit: int) -> str:
    found = sorted(marked_words(generator, limit), key=lambda word: (len(word), word))
    shown = ", ".join(" ".join(word) or "ε" for word in found)
    return f"{generator.name or 'generator'} ({len(generator)} states): {{{shown}}}"


def render_synthesis(report: SynthesisReport, limit: int = 6) -> str:
    lines = [
        f"Σk = {{{', '.join(sorted(report.problem.sigma_k))}}} "
        f"({report.problem.observation.value} observation)",
        "coordinator " + render_language(report.coordinator, limit),
    ]
    for side, (spec, sup) in enumerate(zip(report.local_specs, report.local_supervisors), start=1):
        lines.append(f"local spec {side}: " + render_language(spec, limit))
        lines.append(f"local supervisor {side}: " + render_language(sup, limit))
    lines.append(render_verdict(report.nonconflicting))
    if report.pk_condition is not None:
        lines.append(render_verdict(report.pk_condition))
    if report.posterior_supervisor is not None:
        lines.append("coordinator supervisor " + render_language(report.posterior_supervisor, limit))
        lines.extend(render_verdict(v) for v in report.posterior_nonconflicting)
        if report.distributed_matches is False:
            lines.append("distributed coordinator supervisor differed; the direct form was used")
    if report.result is not None:
        lines.append("result " + render_language(report.result, limit))
    lines.append(f"supremal: {'yes' if report.supremal else 'no'} ({report.theorem_applied.value})")
    return "\n".join(lines)


def render_sufficient_conditions(report: SufficientConditionReport) -> str:
    lines = ["global route:"]
    lines.extend("  " + render_verdict(v) for v in report.global_route)
    lines.append("lifted route:")
    lines.extend("  " + render_verdict(v) for v in report.lifted_route)
    lines.append(f"predicts supremal: {'yes' if report.predicts_supremal else 'no'}")
    return "\n".join(lines)
