"""Decision procedures for the language properties used by coordination control.

Every check takes generators and tests ``K̄ = closure(L_m(k))`` where the
definitions speak of a specification; the plant contributes its generated
language. Failing checks carry a minimal-length witness found by breadth-first
search, so reports and tests are deterministic.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterator, List, Optional, Tuple

from descoord.automata import (
    Alphabet,
    EventId,
    Generator,
    ProjectionSpec,
    Word,
    determinize_projection,
    difference,
    intersect,
    is_trim,
    language_subset,
    lift,
    mark_all,
    prefix_closure,
    project,
    shortest_marked_word,
    shortest_words,
    sync_product,
)
from descoord.errors import AlphabetMismatch, PreconditionViolated

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    """Counterexample words plus the offending event, when the property names one."""

    words: Tuple[Word, ...]
    event: Optional[EventId] = None

    def describe(self) -> str:
        rendered = ", ".join(" ".join(word) or "ε" for word in self.words)
        if self.event is not None:
            return f"({rendered}; {self.event})"
        return f"({rendered})"


@dataclass(frozen=True)
class PropertyVerdict:
    property: str
    holds: bool
    witness: Optional[Witness] = None
    side: Optional[int] = None
    detail: str = ""

    def __post_init__(self) -> None:
        if not self.holds and self.witness is None:
            raise ValueError(f"a failed {self.property} verdict needs a witness")

    def __bool__(self) -> bool:
        return self.holds

    @classmethod
    def ok(cls, name: str, *, side: Optional[int] = None, detail: str = "") -> "PropertyVerdict":
        return cls(name, True, None, side, detail)

    @classmethod
    def violated(
        cls,
        name: str,
        words: Tuple[Word, ...],
        event: Optional[EventId] = None,
        *,
        side: Optional[int] = None,
        detail: str = "",
    ) -> "PropertyVerdict":
        return cls(name, False, Witness(words, event), side, detail)

    def on_side(self, side: int) -> "PropertyVerdict":
        return PropertyVerdict(self.property, self.holds, self.witness, side, self.detail)

    def renamed(self, name: str) -> "PropertyVerdict":
        return PropertyVerdict(name, self.holds, self.witness, self.side, self.detail)


def _require_same_alphabet(*generators: Generator) -> Alphabet:
    alphabet = generators[0].alphabet
    for generator in generators[1:]:
        if generator.alphabet != alphabet:
            raise AlphabetMismatch(
                f"alphabets differ: {sorted(alphabet.events)} vs {sorted(generator.alphabet.events)}"
            )
    return alphabet


def _require_source(p: ProjectionSpec, g: Generator) -> None:
    if p.source != g.alphabet:
        raise AlphabetMismatch("projection source differs from the generator alphabet")


Label = Tuple[str, EventId]


def _first_violation(
    initial: Hashable,
    expand: Callable[[Hashable], Iterator[Tuple[Label, Hashable]]],
    check: Callable[[Hashable], Optional[EventId]],
) -> Optional[Tuple[List[Label], EventId]]:
    """Breadth-first search for the nearest state where ``check`` reports an event."""

    parents: Dict[Hashable, Optional[Tuple[Hashable, Label]]] = {initial: None}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        found = check(state)
        if found is not None:
            labels: List[Label] = []
            cursor = parents[state]
            while cursor is not None:
                previous, label = cursor
                labels.append(label)
                cursor = parents[previous]
            labels.reverse()
            return labels, found
        for label, target in expand(state):
            if target not in parents:
                parents[target] = (state, label)
                queue.append(target)
    return None


def _word_of(labels: List[Label], movers: Tuple[str, ...]) -> Word:
    return tuple(event for who, event in labels if who in movers)


def is_controllable(k: Generator, l: Generator) -> PropertyVerdict:
    """closure(K)·Σu ∩ L(l) ⊆ closure(K)."""

    alphabet = _require_same_alphabet(k, l)
    closure = prefix_closure(k)
    if closure.is_empty or l.is_empty:
        return PropertyVerdict.ok("controllable")
    events = alphabet.sorted_events()
    uncontrollable = sorted(alphabet.uncontrollable)

    def expand(state: Hashable) -> Iterator[Tuple[Label, Hashable]]:
        x, y = state  # type: ignore[misc]
        for event in events:
            nx, ny = closure.step(x, event), l.step(y, event)
            if nx is not None and ny is not None:
                yield ("s", event), (nx, ny)

    def check(state: Hashable) -> Optional[EventId]:
        x, y = state  # type: ignore[misc]
        for event in uncontrollable:
            if l.step(y, event) is not None and closure.step(x, event) is None:
                return event
        return None

    found = _first_violation((closure.initial, l.initial), expand, check)
    if found is None:
        return PropertyVerdict.ok("controllable")
    labels, event = found
    return PropertyVerdict.violated("controllable", (_word_of(labels, ("s",)),), event)


def is_observable(k: Generator, l: Generator) -> PropertyVerdict:
    """No s, s' ∈ K̄ with P(s)=P(s') and σ ∈ Σc such that sσ ∈ L∖K̄ while s'σ ∈ K̄.

    Decided on the reachable triples (K̄-state of s, L-state of s, K̄-state of s')
    synchronised on observable events; the witness is ``(s, s')`` and ``σ``.
    """

    alphabet = _require_same_alphabet(k, l)
    closure = prefix_closure(k)
    if closure.is_empty or l.is_empty:
        return PropertyVerdict.ok("observable")
    events = alphabet.sorted_events()
    controllable = sorted(alphabet.controllable)

    def expand(state: Hashable) -> Iterator[Tuple[Label, Hashable]]:
        x, y, x2 = state  # type: ignore[misc]
        for event in events:
            nx, nx2 = closure.step(x, event), closure.step(x2, event)
            if event in alphabet.observable:
                if nx is not None and nx2 is not None:
                    yield ("both", event), (nx, l.step(y, event), nx2)
                continue
            if nx is not None:
                yield ("s", event), (nx, l.step(y, event), x2)
            if nx2 is not None:
                yield ("t", event), (x, y, nx2)

    def check(state: Hashable) -> Optional[EventId]:
        x, y, x2 = state  # type: ignore[misc]
        for event in controllable:
            if (
                closure.step(x, event) is None
                and l.step(y, event) is not None
                and closure.step(x2, event) is not None
            ):
                return event
        return None

    found = _first_violation((closure.initial, l.initial, closure.initial), expand, check)
    if found is None:
        return PropertyVerdict.ok("observable")
    labels, event = found
    words = (_word_of(labels, ("s", "both")), _word_of(labels, ("t", "both")))
    return PropertyVerdict.violated("observable", words, event)


def is_relatively_observable(k: Generator, c: Generator, l: Generator) -> PropertyVerdict:
    """C-observability: P(s)=P(s'), sσ ∈ K̄, s' ∈ C̄, s'σ ∈ L imply s'σ ∈ K̄, for every σ ∈ Σ."""

    alphabet = _require_same_alphabet(k, c, l)
    closure = prefix_closure(k)
    ambient = prefix_closure(c)
    if not language_subset(closure, ambient).marked:
        raise PreconditionViolated("relative observability needs closure(K) ⊆ closure(C)")
    if not language_subset(ambient, mark_all(l)).marked:
        raise PreconditionViolated("relative observability needs closure(C) ⊆ L")
    if closure.is_empty:
        return PropertyVerdict.ok("relatively observable")
    events = alphabet.sorted_events()

    def expand(state: Hashable) -> Iterator[Tuple[Label, Hashable]]:
        x, z, y, x2 = state  # type: ignore[misc]
        for event in events:
            nx, nz = closure.step(x, event), ambient.step(z, event)
            if event in alphabet.observable:
                if nx is not None and nz is not None:
                    yield ("both", event), (nx, nz, l.step(y, event), closure.step(x2, event))
                continue
            if nx is not None:
                yield ("s", event), (nx, z, y, x2)
            if nz is not None:
                yield ("t", event), (x, nz, l.step(y, event), closure.step(x2, event))

    def check(state: Hashable) -> Optional[EventId]:
        x, _z, y, x2 = state  # type: ignore[misc]
        for event in events:
            if (
                closure.step(x, event) is not None
                and l.step(y, event) is not None
                and closure.step(x2, event) is None
            ):
                return event
        return None

    initial = (closure.initial, ambient.initial, l.initial, closure.initial)
    found = _first_violation(initial, expand, check)
    if found is None:
        return PropertyVerdict.ok("relatively observable")
    labels, event = found
    words = (_word_of(labels, ("s", "both")), _word_of(labels, ("t", "both")))
    return PropertyVerdict.violated("relatively observable", words, event)


def is_normal(k: Generator, l: Generator, p: Optional[ProjectionSpec] = None) -> PropertyVerdict:
    """closure(K) = P⁻¹P(closure(K)) ∩ L(l); ``p`` defaults to the projection onto Σo."""

    alphabet = _require_same_alphabet(k, l)
    projection = p if p is not None else ProjectionSpec.observation(alphabet)
    _require_source(projection, k)
    closure = prefix_closure(k)
    plant = mark_all(l)

    outside = shortest_marked_word(difference(closure, plant))
    if outside is not None:
        return PropertyVerdict.violated(
            "normal", (outside,), detail="closure(K) is not contained in the plant language"
        )
    observed = lift(project(closure, projection), alphabet)
    extra = shortest_marked_word(difference(intersect(observed, plant), closure))
    if extra is None:
        return PropertyVerdict.ok("normal")
    return PropertyVerdict.violated("normal", (extra,))


def is_lm_closed(k: Generator, g: Generator) -> PropertyVerdict:
    """K = closure(K) ∩ L_m(g)."""

    _require_same_alphabet(k, g)
    closed_part = intersect(prefix_closure(k), g)
    extra = shortest_marked_word(difference(closed_part, k))
    if extra is not None:
        return PropertyVerdict.violated("Lm-closed", (extra,))
    missing = shortest_marked_word(difference(k, closed_part))
    if missing is not None:
        return PropertyVerdict.violated(
            "Lm-closed", (missing,), detail="K contains words outside L_m of the plant"
        )
    return PropertyVerdict.ok("Lm-closed")


def is_sync_nonconflicting(k1: Generator, k2: Generator) -> PropertyVerdict:
    """closure(K1 ∥ K2) = closure(K1) ∥ closure(K2)."""

    left = prefix_closure(sync_product(k1, k2))
    right = sync_product(prefix_closure(k1), prefix_closure(k2))
    extra = shortest_marked_word(difference(right, left))
    if extra is None:
        return PropertyVerdict.ok("synchronously nonconflicting")
    return PropertyVerdict.violated("synchronously nonconflicting", (extra,))


def observer_violations(p: ProjectionSpec, g: Generator, *, limit: Optional[int] = None) -> List[Witness]:
    """Violations of the L_m(g)-observer property, nearest first.

    For every reachable pair (q, x) of g and its determinised projection, the
    observations still possible from x must all be completable from q.
    """

    _require_source(p, g)
    if g.is_empty:
        return []
    observed, _subsets = determinize_projection(g, p)
    events = g.alphabet.sorted_events()
    local_projections: Dict[Hashable, Generator] = {}
    violations: List[Witness] = []

    start = (g.initial, observed.initial)
    paths: Dict[Hashable, Word] = {start: ()}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        q, x = state
        if q not in local_projections:
            local_projections[q] = project(g.restarted(q), p)
        missing = shortest_marked_word(difference(observed.restarted(x), local_projections[q]))
        if missing is not None:
            word = paths[state]
            violations.append(Witness((word, p.apply(word) + missing)))
            if limit is not None and len(violations) >= limit:
                break
        for event in events:
            nq = g.step(q, event)
            if nq is None:
                continue
            nx = observed.step(x, event) if event in p.target_events else x
            target = (nq, nx)
            if target not in paths:
                paths[target] = paths[state] + (event,)
                queue.append(target)
    return violations


def is_observer(p: ProjectionSpec, g: Generator) -> PropertyVerdict:
    _require_source(p, g)
    if not is_trim(g):
        raise PreconditionViolated("the observer check needs a trim generator")
    violations = observer_violations(p, g, limit=1)
    if not violations:
        return PropertyVerdict.ok("observer")
    return PropertyVerdict("observer", False, violations[0])


def is_occ(p: ProjectionSpec, g: Generator) -> PropertyVerdict:
    """Output control consistency of ``p`` for the prefix-closed L(g).

    The search tracks whether a controllable hidden event occurred since the
    last observed event; an uncontrollable observed event enabled while the flag
    is raised is a violation.
    """

    _require_source(p, g)
    if g.is_empty:
        return PropertyVerdict.ok("OCC")
    alphabet = g.alphabet
    events = alphabet.sorted_events()
    guarded = sorted(p.target_events & alphabet.uncontrollable)

    def expand(state: Hashable) -> Iterator[Tuple[Label, Hashable]]:
        q, flag = state  # type: ignore[misc]
        for event in events:
            nq = g.step(q, event)
            if nq is None:
                continue
            if event in p.target_events:
                yield ("s", event), (nq, False)
            else:
                yield ("s", event), (nq, flag or event in alphabet.controllable)

    def check(state: Hashable) -> Optional[EventId]:
        q, flag = state  # type: ignore[misc]
        if not flag:
            return None
        for event in guarded:
            if g.step(q, event) is not None:
                return event
        return None

    found = _first_violation((g.initial, False), expand, check)
    if found is None:
        return PropertyVerdict.ok("OCC")
    labels, event = found
    return PropertyVerdict.violated("OCC", (_word_of(labels, ("s",)) + (event,),), event)


def _reach(g: Generator, start: Hashable, allowed: frozenset) -> set:
    seen = {start}
    stack = [start]
    while stack:
        state = stack.pop()
        for event, target in g.successors(state).items():
            if event in allowed and target not in seen:
                seen.add(target)
                stack.append(target)
    return seen


def is_lcc(p: ProjectionSpec, g: Generator) -> PropertyVerdict:
    """Local control consistency of ``p`` for the prefix-closed L(g).

    The condition only depends on the state reached by a word, so every
    accessible state is examined once, nearest first.
    """

    _require_source(p, g)
    if g.is_empty:
        return PropertyVerdict.ok("LCC")
    alphabet = g.alphabet
    hidden = p.hidden_events
    hidden_uncontrollable = hidden & alphabet.uncontrollable
    guarded = sorted(p.target_events & alphabet.uncontrollable)
    words = shortest_words(g)
    for state in sorted(words, key=lambda s: (len(words[s]), words[s])):
        anywhere = _reach(g, state, hidden)
        forced = _reach(g, state, hidden_uncontrollable)
        for event in guarded:
            if any(event in g.successors(q) for q in anywhere) and not any(
                event in g.successors(q) for q in forced
            ):
                return PropertyVerdict.violated("LCC", (words[state],), event)
    return PropertyVerdict.ok("LCC")
