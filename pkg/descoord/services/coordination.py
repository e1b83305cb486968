"""Coordination control of two subsystems with a postponed coordinator supervisor.

The local supervisors are synthesised for P_{i+k}(K) against G_i ∥ G_k. The
coordinator-level language P_k(sup_1) ∩ P_k(sup_2) is then checked against the
coordinator. When it is controllable (and normal) the product of the local
supervisors is supremal; otherwise a coordinator supervisor is computed at the
end and composed in, which keeps the solution sound.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from descoord.automata import (
    Alphabet,
    EventId,
    Generator,
    ProjectionSpec,
    difference,
    intersect,
    is_nonblocking,
    language_equal,
    language_subset,
    lift,
    mark_all,
    prefix_closure,
    project,
    project_onto,
    shortest_marked_word,
    sync_product,
    sync_product_all,
    trim,
)
from descoord.errors import (
    AlphabetConstraintViolated,
    AlphabetMismatch,
    NonconflictCheckFailed,
    NotConditionallyDecomposable,
    PreconditionViolated,
)

from .properties import (
    PropertyVerdict,
    is_controllable,
    is_lcc,
    is_lm_closed,
    is_normal,
    is_observable,
    is_observer,
    is_occ,
    is_sync_nonconflicting,
    observer_violations,
)
from .synthesis import SynthesisInput, sup_c, sup_cn
from .tracing import NullTimer, StageTimer

LOGGER = logging.getLogger(__name__)


class Observation(str, Enum):
    FULL = "full"
    PARTIAL = "partial"


class TheoremApplied(str, Enum):
    SUPREMAL = "supremal"
    SUPREMAL_FULL_OBSERVATION = "supremal-full-observation"
    POSTPONED_SUPERVISOR = "postponed-coordinator-supervisor"
    NONE = "none"


def _check_alphabet_split(
    events: FrozenSet[EventId],
    sigma1: FrozenSet[EventId],
    sigma2: FrozenSet[EventId],
    sigma_k: FrozenSet[EventId],
) -> None:
    shared = sigma1 & sigma2
    if not shared <= sigma_k:
        raise AlphabetConstraintViolated(
            f"coordinator alphabet misses shared events {sorted(shared - sigma_k)}"
        )
    if not sigma_k <= sigma1 | sigma2:
        raise AlphabetConstraintViolated(
            f"coordinator alphabet has foreign events {sorted(sigma_k - (sigma1 | sigma2))}"
        )
    if events != sigma1 | sigma2:
        raise AlphabetConstraintViolated("specification alphabet must be Σ1 ∪ Σ2")


@dataclass(frozen=True)
class CoordinationProblem:
    g1: Generator
    g2: Generator
    spec: Generator
    sigma_k: FrozenSet[EventId]
    observation: Observation = Observation.FULL

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma_k", frozenset(self.sigma_k))
        object.__setattr__(self, "observation", Observation(self.observation))
        merged = self.g1.alphabet.merge(self.g2.alphabet)
        _check_alphabet_split(
            self.spec.alphabet.events, self.sigma_1, self.sigma_2, self.sigma_k
        )
        if self.spec.alphabet != merged:
            raise AlphabetMismatch("specification attributes disagree with the subsystems")

    @property
    def alphabet(self) -> Alphabet:
        return self.spec.alphabet

    @property
    def sigma_1(self) -> FrozenSet[EventId]:
        return self.g1.alphabet.events

    @property
    def sigma_2(self) -> FrozenSet[EventId]:
        return self.g2.alphabet.events

    @property
    def coordinator_alphabet(self) -> Alphabet:
        return self.alphabet.restrict(self.sigma_k)

    def plant(self, side: int) -> Generator:
        return self.g1 if side == 1 else self.g2

    def local_alphabet(self, side: int) -> Alphabet:
        return self.alphabet.restrict(self.plant(side).alphabet.events | self.sigma_k)

    def projection(self, side: int) -> ProjectionSpec:
        """P_{i+k} from Σ1 ∪ Σ2 onto Σi ∪ Σk."""

        return ProjectionSpec(self.alphabet, self.local_alphabet(side).events)

    def with_sigma_k(self, sigma_k: Iterable[EventId]) -> "CoordinationProblem":
        return replace(self, sigma_k=frozenset(sigma_k))


def is_conditionally_decomposable(
    spec: Generator,
    sigma1: Iterable[EventId],
    sigma2: Iterable[EventId],
    sigma_k: Iterable[EventId],
    *,
    closed: bool = False,
) -> PropertyVerdict:
    """K = P_{1+k}(K) ∥ P_{2+k}(K); with ``closed`` the test runs on closure(K)."""

    s1, s2, sk = frozenset(sigma1), frozenset(sigma2), frozenset(sigma_k)
    _check_alphabet_split(spec.alphabet.events, s1, s2, sk)
    name = "conditionally decomposable (closure)" if closed else "conditionally decomposable"
    extra = _decomposition_mismatch(spec, s1, s2, sk, closed=closed)
    word = shortest_marked_word(extra)
    if word is None:
        return PropertyVerdict.ok(name)
    return PropertyVerdict.violated(name, (word,))


def _decomposition_mismatch(
    spec: Generator,
    sigma1: FrozenSet[EventId],
    sigma2: FrozenSet[EventId],
    sigma_k: FrozenSet[EventId],
    *,
    closed: bool,
) -> Generator:
    target = prefix_closure(spec) if closed else spec
    composed = sync_product(
        project_onto(target, sigma1 | sigma_k), project_onto(target, sigma2 | sigma_k)
    )
    return difference(composed, target)


def _greedy_extend(
    start: FrozenSet[EventId],
    universe: FrozenSet[EventId],
    measure: Callable[[FrozenSet[EventId]], int],
    reason: str,
) -> FrozenSet[EventId]:
    current = start
    score = measure(current)
    while score > 0:
        candidates = sorted(universe - current)
        if not candidates:
            break
        ranked = sorted((measure(current | {event}), event) for event in candidates)
        score, chosen = ranked[0]
        current = current | {chosen}
        LOGGER.info(
            "alphabet_extended",
            extra={"reason": reason, "event": chosen, "remaining": score},
        )
    return current


def extend_alphabet_for_cd(
    spec: Generator,
    sigma1: Iterable[EventId],
    sigma2: Iterable[EventId],
    sigma_k: Iterable[EventId],
) -> FrozenSet[EventId]:
    """Greedily grow Σk until both K and closure(K) are conditionally decomposable.

    Each step adds the event leaving the smallest mismatch generators (state
    count), ties broken by event name. Σ1 ∪ Σ2 always works, so the loop ends.
    """

    s1, s2 = frozenset(sigma1), frozenset(sigma2)
    start = frozenset(sigma_k) | (s1 & s2)

    def mismatch(candidate: FrozenSet[EventId]) -> int:
        return len(_decomposition_mismatch(spec, s1, s2, candidate, closed=False)) + len(
            _decomposition_mismatch(spec, s1, s2, candidate, closed=True)
        )

    _check_alphabet_split(spec.alphabet.events, s1, s2, start)
    return _greedy_extend(start, s1 | s2, mismatch, "conditional_decomposability")


def extend_alphabet_for_observer(
    g1: Generator, g2: Generator, sigma_k: Iterable[EventId]
) -> FrozenSet[EventId]:
    """Greedily grow Σk until P_k is an L(G_i)-observer for both subsystems."""

    plants = (mark_all(g1), mark_all(g2))
    start = frozenset(sigma_k) | (g1.alphabet.events & g2.alphabet.events)

    def violations(candidate: FrozenSet[EventId]) -> int:
        return sum(
            len(observer_violations(ProjectionSpec.onto(plant.alphabet, candidate), plant))
            for plant in plants
        )

    universe = g1.alphabet.events | g2.alphabet.events
    return _greedy_extend(start, universe, violations, "observer")


def build_coordinator(g1: Generator, g2: Generator, sigma_k: Iterable[EventId]) -> Generator:
    """G_k = P_k(G1) ∥ P_k(G2), trimmed."""

    events = frozenset(sigma_k)
    shared = g1.alphabet.events & g2.alphabet.events
    if not shared <= events:
        raise AlphabetConstraintViolated(
            f"coordinator alphabet misses shared events {sorted(shared - events)}"
        )
    coordinator = sync_product(project_onto(g1, events), project_onto(g2, events), "Gk")
    return trim(coordinator).renamed("Gk")


def _local_plant(problem: CoordinationProblem, gk: Generator, side: int) -> Generator:
    return sync_product(problem.plant(side), gk)


def _require_embedded(problem: CoordinationProblem, gk: Generator) -> None:
    if gk.alphabet != problem.coordinator_alphabet:
        raise AlphabetMismatch("coordinator alphabet differs from Σk")
    plant = sync_product_all([problem.g1, problem.g2, gk])
    if not language_subset(problem.spec, plant).marked:
        raise PreconditionViolated("K must be contained in L_m(G1 ∥ G2 ∥ Gk)")


def _per_side(
    problem: CoordinationProblem,
    gk: Generator,
    name: str,
    check: Callable[[Generator, Generator], PropertyVerdict],
) -> PropertyVerdict:
    _require_embedded(problem, gk)
    for side in (1, 2):
        local_spec = project(problem.spec, problem.projection(side))
        verdict = check(local_spec, _local_plant(problem, gk, side))
        if not verdict:
            return verdict.renamed(name).on_side(side)
    return PropertyVerdict.ok(name)


def is_conditionally_controllable(problem: CoordinationProblem, gk: Generator) -> PropertyVerdict:
    return _per_side(problem, gk, "conditionally controllable", is_controllable)


def is_conditionally_observable(problem: CoordinationProblem, gk: Generator) -> PropertyVerdict:
    return _per_side(problem, gk, "conditionally observable", is_observable)


def is_conditionally_normal(problem: CoordinationProblem, gk: Generator) -> PropertyVerdict:
    return _per_side(problem, gk, "conditionally normal", is_normal)


def is_conditionally_closed(problem: CoordinationProblem, gk: Generator) -> PropertyVerdict:
    return _per_side(problem, gk, "conditionally closed", is_lm_closed)


@dataclass(frozen=True)
class SynthesisReport:
    problem: CoordinationProblem
    coordinator: Generator
    local_specs: Tuple[Generator, Generator]
    local_plants: Tuple[Generator, Generator]
    local_supervisors: Tuple[Generator, Generator]
    nonconflicting: PropertyVerdict
    pk_intersection: Optional[Generator] = None
    pk_condition: Optional[PropertyVerdict] = None
    posterior_supervisor: Optional[Generator] = None
    posterior_nonconflicting: Tuple[PropertyVerdict, ...] = ()
    distributed_matches: Optional[bool] = None
    result: Optional[Generator] = None
    supremal: bool = False
    theorem_applied: TheoremApplied = TheoremApplied.NONE
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.result is not None


def _local_supervisor(problem: CoordinationProblem, spec: Generator, plant: Generator) -> Generator:
    if problem.observation is Observation.FULL:
        return sup_c(SynthesisInput(spec, plant))
    return sup_cn(SynthesisInput(spec, plant, ProjectionSpec.observation(plant.alphabet)))


def _coordinator_condition(
    problem: CoordinationProblem, candidate: Generator, gk: Generator
) -> PropertyVerdict:
    name = "controllable w.r.t. L(Gk)"
    verdict = is_controllable(candidate, gk)
    if verdict and problem.observation is Observation.PARTIAL:
        name = "controllable and normal w.r.t. L(Gk)"
        verdict = is_normal(candidate, gk)
    return verdict.renamed(name)


def synthesize(
    problem: CoordinationProblem,
    *,
    timer: Optional[StageTimer] = None,
    check_distributed: bool = True,
) -> SynthesisReport:
    """Run the coordination pipeline and return every intermediate artefact.

    Raises ``NotConditionallyDecomposable`` when K or closure(K) does not
    decompose over Σk, and ``NonconflictCheckFailed`` (with the partial report)
    when the local supervisors or the coordinator supervisor conflict.
    """

    timer = timer or NullTimer()
    sigma1, sigma2, sigma_k = problem.sigma_1, problem.sigma_2, problem.sigma_k

    with timer.track_time("decomposability"):
        for closed in (False, True):
            verdict = is_conditionally_decomposable(
                problem.spec, sigma1, sigma2, sigma_k, closed=closed
            )
            if not verdict:
                raise NotConditionallyDecomposable(
                    f"specification is not {verdict.property} for Σk={sorted(sigma_k)}", verdict
                )

    with timer.track_time("coordinator"):
        gk = build_coordinator(problem.g1, problem.g2, sigma_k)

    with timer.track_time("local_supervisors"):
        local_specs = tuple(project(problem.spec, problem.projection(side)) for side in (1, 2))
        local_plants = tuple(_local_plant(problem, gk, side) for side in (1, 2))
        supervisors = tuple(
            _local_supervisor(problem, spec, plant).renamed(f"sup{side}k")
            for side, spec, plant in zip((1, 2), local_specs, local_plants)
        )

    sup1, sup2 = supervisors
    with timer.track_time("nonconflict"):
        nonconflicting = is_sync_nonconflicting(sup1, sup2)
    report = SynthesisReport(
        problem=problem,
        coordinator=gk,
        local_specs=local_specs,  # type: ignore[arg-type]
        local_plants=local_plants,  # type: ignore[arg-type]
        local_supervisors=supervisors,  # type: ignore[arg-type]
        nonconflicting=nonconflicting,
    )
    if not nonconflicting:
        raise NonconflictCheckFailed(
            "local supervisors are conflicting", replace(report, timings=timer.flush())
        )

    with timer.track_time("coordinator_check"):
        pk_intersection = intersect(project_onto(sup1, sigma_k), project_onto(sup2, sigma_k))
        pk_condition = _coordinator_condition(problem, pk_intersection, gk)
    report = replace(report, pk_intersection=pk_intersection, pk_condition=pk_condition)

    if pk_condition:
        theorem = (
            TheoremApplied.SUPREMAL_FULL_OBSERVATION
            if problem.observation is Observation.FULL
            else TheoremApplied.SUPREMAL
        )
        with timer.track_time("composition"):
            result = sync_product(sup1, sup2, "M")
        report = replace(report, result=result, supremal=True, theorem_applied=theorem)
    else:
        with timer.track_time("posterior_supervisor"):
            posterior, matches = _posterior_supervisor(
                problem, sup1, sup2, pk_intersection, gk, check_distributed
            )
            checks = tuple(
                is_sync_nonconflicting(posterior, sup).on_side(side)
                for side, sup in ((1, sup1), (2, sup2))
            )
        report = replace(
            report,
            posterior_supervisor=posterior,
            posterior_nonconflicting=checks,
            distributed_matches=matches,
        )
        failed = [verdict for verdict in checks if not verdict]
        if failed:
            raise NonconflictCheckFailed(
                f"coordinator supervisor conflicts with side {failed[0].side}",
                replace(report, timings=timer.flush()),
            )
        with timer.track_time("composition"):
            result = sync_product_all([posterior, sup1, sup2], "M")
        report = replace(
            report,
            result=result,
            supremal=False,
            theorem_applied=TheoremApplied.POSTPONED_SUPERVISOR,
        )

    report = replace(report, timings=timer.flush())
    LOGGER.info(
        "synthesis_completed",
        extra={
            "sigma_k": sorted(sigma_k),
            "supremal": report.supremal,
            "theorem": report.theorem_applied.value,
            "states": len(report.result) if report.result is not None else 0,
        },
    )
    return report


def _posterior_supervisor(
    problem: CoordinationProblem,
    sup1: Generator,
    sup2: Generator,
    pk_intersection: Generator,
    gk: Generator,
    check_distributed: bool,
) -> Tuple[Generator, Optional[bool]]:
    """supCN'_k computed per side and intersected; optionally compared with the direct form."""

    projection = (
        ProjectionSpec.observation(gk.alphabet)
        if problem.observation is Observation.PARTIAL
        else None
    )
    synthesis = sup_cn if projection is not None else sup_c
    per_side = [
        synthesis(SynthesisInput(project_onto(sup, problem.sigma_k), gk, projection))
        for sup in (sup1, sup2)
    ]
    distributed = trim(intersect(per_side[0], per_side[1])).renamed("supk")
    if not check_distributed:
        return distributed, None
    monolithic = synthesis(SynthesisInput(pk_intersection, gk, projection)).renamed("supk")
    if language_equal(distributed, monolithic):
        return distributed, True
    LOGGER.warning(
        "distributed_supervisor_mismatch",
        extra={"distributed": len(distributed), "monolithic": len(monolithic)},
    )
    return monolithic, False


def verify_existence_theorem(
    problem: CoordinationProblem, gk: Generator, s1: Generator, s2: Generator
) -> PropertyVerdict:
    """Check that supervisors ``s1`` and ``s2`` realise K with nonblocking closed loops.

    Each closed loop is s_i ∥ G_i ∥ G_k. Observability of the supervisor languages
    is reported in ``detail`` under partial observation but does not decide the verdict.
    """

    name = "existence"
    loops: List[Generator] = []
    notes: List[str] = []
    for side, supervisor in ((1, s1), (2, s2)):
        if supervisor.alphabet != problem.local_alphabet(side):
            raise AlphabetMismatch(f"supervisor {side} must be defined over Σ{side} ∪ Σk")
        plant = _local_plant(problem, gk, side)
        loops.append(sync_product(supervisor, plant))
        if problem.observation is Observation.PARTIAL:
            observable = is_observable(supervisor, plant)
            notes.append(f"supervisor {side} {'is' if observable else 'is not'} observable")

    def describe(reason: str = "") -> str:
        return "; ".join(part for part in [reason, *notes] if part)

    for side, loop in enumerate(loops, start=1):
        if not is_nonblocking(loop):
            blocked = shortest_marked_word(difference(mark_all(loop), prefix_closure(loop)))
            return PropertyVerdict.violated(
                name, (blocked or (),), side=side, detail=describe(f"closed loop {side} blocks")
            )

    achieved = sync_product(loops[0], loops[1])
    for extra, reason in (
        (difference(achieved, problem.spec), "closed loops exceed K"),
        (difference(problem.spec, achieved), "closed loops miss part of K"),
    ):
        word = shortest_marked_word(extra)
        if word is not None:
            return PropertyVerdict.violated(name, (word,), detail=describe(reason))
    return PropertyVerdict.ok(name, detail=describe())


@dataclass(frozen=True)
class SufficientConditionReport:
    """Verdicts of the two sufficient-condition routes, per side."""

    global_route: Tuple[PropertyVerdict, ...]
    lifted_route: Tuple[PropertyVerdict, ...]

    def _holds(self, prefix: str, side: int) -> bool:
        return all(v.holds for v in self.lifted_route if v.side == side and v.property.startswith(prefix))

    @property
    def predicts_supremal(self) -> bool:
        """Observer plus OCC or LCC on both lifted sides."""

        return all(
            self._holds("observer", side) and (self._holds("OCC", side) or self._holds("LCC", side))
            for side in (1, 2)
        )

    @property
    def verdicts(self) -> Tuple[PropertyVerdict, ...]:
        return self.global_route + self.lifted_route


def sufficient_condition_report(problem: CoordinationProblem, gk: Generator) -> SufficientConditionReport:
    whole = mark_all(sync_product_all([problem.g1, problem.g2, gk]))
    global_route: List[PropertyVerdict] = []
    lifted_route: List[PropertyVerdict] = []
    for side in (1, 2):
        p = problem.projection(side)
        global_route.append(is_observer(p, whole).renamed(f"observer P{side}+k").on_side(side))
        global_route.append(is_lcc(p, whole).renamed(f"LCC P{side}+k").on_side(side))

        local = problem.local_alphabet(side)
        lifted = lift(mark_all(problem.plant(side)), local)
        pk = ProjectionSpec.onto(local, problem.sigma_k)
        lifted_route.append(is_observer(pk, lifted).renamed("observer Pk").on_side(side))
        lifted_route.append(is_occ(pk, lifted).renamed("OCC Pk").on_side(side))
        lifted_route.append(is_lcc(pk, lifted).renamed("LCC Pk").on_side(side))
    return SufficientConditionReport(tuple(global_route), tuple(lifted_route))


def build_problem(
    g1: Generator,
    g2: Generator,
    spec: Generator,
    *,
    sigma_k: Iterable[EventId] = (),
    observation: Observation = Observation.FULL,
    ensure_observer: bool = False,
) -> Tuple[CoordinationProblem, Generator]:
    """Choose Σk and construct the coordinator.

    Σk starts from the shared events and grows until K and closure(K) are
    conditionally decomposable. With ``ensure_observer`` the observer and
    decomposability extensions alternate until neither adds an event, so the
    final Σk satisfies both.
    """

    events = frozenset(sigma_k) | (g1.alphabet.events & g2.alphabet.events)
    while True:
        grown = events
        if ensure_observer:
            grown = extend_alphabet_for_observer(g1, g2, grown)
        grown = extend_alphabet_for_cd(spec, g1.alphabet.events, g2.alphabet.events, grown)
        if grown == events:
            break
        events = grown
    problem = CoordinationProblem(g1, g2, spec, events, observation)
    return problem, build_coordinator(g1, g2, events)
