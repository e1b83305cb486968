"""Regular-language algebra over deterministic generators.

Every operation is a pure function. Results are accessible generators numbered
``0..n-1`` in breadth-first order from the initial state (events visited in
name order), so two runs on the same input always print the same automaton.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Literal,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from descoord.errors import AlphabetMismatch, AttributeConflict

from .models import Alphabet, EventId, Generator, ProjectionSpec, State, Word

LOGGER = logging.getLogger(__name__)

LanguageView = Literal["generated", "marked"]


def empty_generator(alphabet: Alphabet, name: str = "") -> Generator:
    return Generator(alphabet, (), None, frozenset(), {}, name)


def universal_generator(alphabet: Alphabet, name: str = "") -> Generator:
    """One marked state with a self-loop per event: L = L_m = Σ*."""

    transitions = {(0, event): 0 for event in alphabet.events}
    return Generator(alphabet, (0,), 0, frozenset({0}), transitions, name)


def _crawl(
    alphabet: Alphabet,
    initial: Optional[Hashable],
    step: Callable[[Hashable, EventId], Optional[Hashable]],
    is_marked: Callable[[Hashable], bool],
    name: str = "",
) -> Tuple[Generator, List[Hashable]]:
    """Explore composite states breadth-first; return the generator and the state order."""

    if initial is None:
        return empty_generator(alphabet, name), []

    index: Dict[Hashable, int] = {initial: 0}
    order: List[Hashable] = [initial]
    transitions: Dict[Tuple[int, EventId], int] = {}
    events = alphabet.sorted_events()

    # iterate over a growing list
    i = 0
    while i < len(order):
        current = order[i]
        for event in events:
            target = step(current, event)
            if target is None:
                continue
            j = index.get(target)
            if j is None:
                j = len(order)
                index[target] = j
                order.append(target)
            transitions[(i, event)] = j
        i += 1

    marked = frozenset(index[state] for state in order if is_marked(state))
    generator = Generator(alphabet, tuple(range(len(order))), 0, marked, transitions, name)
    return generator, order


def _explore(
    alphabet: Alphabet,
    initial: Optional[Hashable],
    step: Callable[[Hashable, EventId], Optional[Hashable]],
    is_marked: Callable[[Hashable], bool],
    name: str = "",
) -> Generator:
    return _crawl(alphabet, initial, step, is_marked, name)[0]


def normalize(g: Generator) -> Generator:
    """Renumber states canonically; unreachable states follow the reachable ones."""

    if g.is_empty:
        return g
    reachable, order = _crawl(g.alphabet, g.initial, g.step, lambda s: s in g.marked, g.name)
    if len(order) == len(g.states):
        return reachable
    index = {state: i for i, state in enumerate(order)}
    for state in g.states:
        if state not in index:
            index[state] = len(index)
    transitions = {
        (index[source], event): index[target]
        for (source, event), target in g.transitions.items()
    }
    marked = frozenset(index[state] for state in g.marked)
    return Generator(g.alphabet, tuple(range(len(index))), 0, marked, transitions, g.name)


def _restrict(g: Generator, keep: Set[State]) -> Generator:
    if g.initial not in keep:
        return empty_generator(g.alphabet, g.name)
    transitions = {
        (source, event): target
        for (source, event), target in g.transitions.items()
        if source in keep and target in keep
    }
    states = tuple(state for state in g.states if state in keep)
    return normalize(
        Generator(g.alphabet, states, g.initial, g.marked & keep, transitions, g.name)
    )


def accessible(g: Generator) -> Generator:
    return _explore(g.alphabet, g.initial, g.step, lambda s: s in g.marked, g.name)


def coaccessible_states(g: Generator) -> Set[State]:
    predecessors: Dict[State, List[State]] = {state: [] for state in g.states}
    for (source, _event), target in g.transitions.items():
        predecessors[target].append(source)
    seen: Set[State] = set(g.marked)
    queue = deque(g.marked)
    while queue:
        state = queue.popleft()
        for previous in predecessors[state]:
            if previous not in seen:
                seen.add(previous)
                queue.append(previous)
    return seen


def coaccessible(g: Generator) -> Generator:
    return _restrict(g, coaccessible_states(g))


def trim(g: Generator) -> Generator:
    return coaccessible(accessible(g))


def is_trim(g: Generator) -> bool:
    return len(trim(g)) == len(g)


def mark_all(g: Generator) -> Generator:
    """Accessible part of ``g`` with every state marked, so that L_m = L(g)."""

    return _explore(g.alphabet, g.initial, g.step, lambda _s: True, g.name)


def prefix_closure(g: Generator) -> Generator:
    """Generator whose marked language is the prefix closure of L_m(g)."""

    trimmed = trim(g)
    return Generator(
        trimmed.alphabet,
        trimmed.states,
        trimmed.initial,
        frozenset(trimmed.states),
        trimmed.transitions,
        g.name,
    )


def sync_product(g1: Generator, g2: Generator, name: str = "") -> Generator:
    alphabet = g1.alphabet.merge(g2.alphabet)
    if g1.is_empty or g2.is_empty:
        return empty_generator(alphabet, name)
    events1 = g1.alphabet.events
    events2 = g2.alphabet.events

    def step(state: Hashable, event: EventId) -> Optional[Hashable]:
        left, right = state  # type: ignore[misc]
        if event in events1:
            left = g1.step(left, event)
            if left is None:
                return None
        if event in events2:
            right = g2.step(right, event)
            if right is None:
                return None
        return (left, right)

    def is_marked(state: Hashable) -> bool:
        left, right = state  # type: ignore[misc]
        return left in g1.marked and right in g2.marked

    return _explore(alphabet, (g1.initial, g2.initial), step, is_marked, name)


def sync_product_all(generators: Sequence[Generator], name: str = "") -> Generator:
    if not generators:
        raise ValueError("at least one generator is required")
    result = generators[0]
    for generator in generators[1:]:
        result = sync_product(result, generator)
    return result.renamed(name) if name else result


def _hidden_closure(g: Generator, states: Iterable[State], hidden: FrozenSet[EventId]) -> FrozenSet[State]:
    seen = set(states)
    stack = list(seen)
    while stack:
        state = stack.pop()
        for event, target in g.successors(state).items():
            if event in hidden and target not in seen:
                seen.add(target)
                stack.append(target)
    return frozenset(seen)


def determinize_projection(
    g: Generator, p: ProjectionSpec
) -> Tuple[Generator, List[FrozenSet[State]]]:
    """Subset construction for P(g); also returns the state subset behind each result state."""

    if p.source != g.alphabet:
        raise AlphabetMismatch("projection source differs from the generator alphabet")
    target = p.target
    if g.is_empty:
        return empty_generator(target, g.name), []
    hidden = p.hidden_events

    def step(subset: Hashable, event: EventId) -> Optional[Hashable]:
        moved = {
            g.successors(state)[event]
            for state in subset  # type: ignore[attr-defined]
            if event in g.successors(state)
        }
        if not moved:
            return None
        return _hidden_closure(g, moved, hidden)

    def is_marked(subset: Hashable) -> bool:
        return any(state in g.marked for state in subset)  # type: ignore[attr-defined]

    initial = _hidden_closure(g, [g.initial], hidden)
    generator, order = _crawl(target, initial, step, is_marked, g.name)
    return generator, [frozenset(subset) for subset in order]  # type: ignore[arg-type]


def project(g: Generator, p: ProjectionSpec) -> Generator:
    return determinize_projection(g, p)[0]


def project_onto(g: Generator, events: Iterable[EventId]) -> Generator:
    """Project ``g`` onto ``events ∩ Σ(g)``."""

    return project(g, ProjectionSpec.onto(g.alphabet, events))


def lift(g: Generator, bigger: Alphabet) -> Generator:
    """Inverse projection: self-loop every event of ``bigger`` that ``g`` does not know."""

    if not g.alphabet.events <= bigger.events:
        raise AlphabetMismatch("lift target alphabet must contain the generator alphabet")
    if bigger.restrict(g.alphabet.events) != g.alphabet:
        raise AttributeConflict("lift target alphabet disagrees on event attributes")
    if g.is_empty:
        return empty_generator(bigger, g.name)
    foreign = bigger.events - g.alphabet.events
    transitions = dict(g.transitions)
    for state in g.states:
        for event in foreign:
            transitions[(state, event)] = state
    return normalize(
        Generator(bigger, g.states, g.initial, g.marked, transitions, g.name)
    )


def _require_same_alphabet(g1: Generator, g2: Generator) -> None:
    if g1.alphabet != g2.alphabet:
        raise AlphabetMismatch(
            f"alphabets differ: {sorted(g1.alphabet.events)} vs {sorted(g2.alphabet.events)}"
        )


def intersect(g1: Generator, g2: Generator, name: str = "") -> Generator:
    _require_same_alphabet(g1, g2)
    return sync_product(g1, g2, name)


def union(g1: Generator, g2: Generator, name: str = "") -> Generator:
    _require_same_alphabet(g1, g2)
    if g1.is_empty and g2.is_empty:
        return empty_generator(g1.alphabet, name)

    def step(state: Hashable, event: EventId) -> Optional[Hashable]:
        left, right = state  # type: ignore[misc]
        left, right = g1.step(left, event), g2.step(right, event)
        if left is None and right is None:
            return None
        return (left, right)

    def is_marked(state: Hashable) -> bool:
        left, right = state  # type: ignore[misc]
        return left in g1.marked or right in g2.marked

    return _explore(g1.alphabet, (g1.initial, g2.initial), step, is_marked, name)


def difference(
    g1: Generator, g2: Generator, view: LanguageView = "marked", name: str = ""
) -> Generator:
    """Trim generator whose marked language is the chosen language of g1 minus that of g2."""

    _require_same_alphabet(g1, g2)
    if g1.is_empty:
        return empty_generator(g1.alphabet, name)

    def step(state: Hashable, event: EventId) -> Optional[Hashable]:
        left, right = state  # type: ignore[misc]
        left = g1.step(left, event)
        if left is None:
            return None
        return (left, g2.step(right, event))

    def is_marked(state: Hashable) -> bool:
        left, right = state  # type: ignore[misc]
        if view == "generated":
            return right is None
        return left in g1.marked and right not in g2.marked

    return trim(_explore(g1.alphabet, (g1.initial, g2.initial), step, is_marked, name))


@dataclass(frozen=True)
class LanguageComparison:
    """Outcome of comparing both the generated and the marked languages."""

    generated: bool
    marked: bool

    def __bool__(self) -> bool:
        return self.generated and self.marked


def language_subset(g1: Generator, g2: Generator) -> LanguageComparison:
    _require_same_alphabet(g1, g2)
    return LanguageComparison(
        generated=difference(g1, g2, "generated").is_empty,
        marked=difference(g1, g2, "marked").is_empty,
    )


def language_equal(g1: Generator, g2: Generator) -> LanguageComparison:
    forward = language_subset(g1, g2)
    backward = language_subset(g2, g1)
    return LanguageComparison(
        generated=forward.generated and backward.generated,
        marked=forward.marked and backward.marked,
    )


def shortest_words(g: Generator) -> Dict[State, Word]:
    """Length-lexicographically least word reaching every accessible state."""

    if g.is_empty:
        return {}
    words: Dict[State, Word] = {g.initial: ()}
    queue = deque([g.initial])
    events = g.alphabet.sorted_events()
    while queue:
        state = queue.popleft()
        successors = g.successors(state)
        for event in events:
            target = successors.get(event)
            if target is not None and target not in words:
                words[target] = words[state] + (event,)
                queue.append(target)
    return words


def shortest_marked_word(g: Generator) -> Optional[Word]:
    words = shortest_words(g)
    candidates = [words[state] for state in g.marked if state in words]
    if not candidates:
        return None
    return min(candidates, key=lambda word: (len(word), word))


def is_nonblocking(g: Generator) -> bool:
    reachable = accessible(g)
    return len(coaccessible_states(reachable)) == len(reachable)


def enumerate_bounded(g: Generator, max_len: int) -> List[Tuple[Word, bool]]:
    """All words of L(g) up to ``max_len`` in length-lexicographic order, with marking."""

    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if g.is_empty:
        return []
    events = g.alphabet.sorted_events()
    layer: List[Tuple[Word, State]] = [((), g.initial)]
    result: List[Tuple[Word, bool]] = []
    for length in range(max_len + 1):
        result.extend((word, state in g.marked) for word, state in layer)
        if length == max_len:
            break
        following: List[Tuple[Word, State]] = []
        for word, state in layer:
            successors = g.successors(state)
            for event in events:
                if event in successors:
                    following.append((word + (event,), successors[event]))
        layer = following
    return result


def marked_words(g: Generator, max_len: int) -> Set[Word]:
    return {word for word, marked in enumerate_bounded(g, max_len) if marked}


def accepts(g: Generator, word: Iterable[EventId]) -> bool:
    state = g.run(word)
    return state is not None and state in g.marked


def generates(g: Generator, word: Iterable[EventId]) -> bool:
    return g.run(word) is not None


def from_words(
    alphabet: Alphabet,
    words: Iterable[Iterable[EventId]],
    *,
    closed: bool = False,
    name: str = "",
) -> Generator:
    """Prefix-tree generator marking ``words`` (or every prefix when ``closed``)."""

    tree: Dict[Word, Dict[EventId, Word]] = {(): {}}
    ends: Set[Word] = set()
    for raw in words:
        word = tuple(raw)
        for event in word:
            if event not in alphabet.events:
                raise AlphabetMismatch(f"word uses unknown event {event!r}")
        for i in range(len(word)):
            prefix, nxt = word[:i], word[: i + 1]
            tree[prefix][word[i]] = nxt
            tree.setdefault(nxt, {})
        ends.add(word)
    if not ends:
        return empty_generator(alphabet, name)

    def step(node: Hashable, event: EventId) -> Optional[Hashable]:
        return tree[node].get(event)  # type: ignore[index]

    def is_marked(node: Hashable) -> bool:
        return closed or node in ends

    return _explore(alphabet, (), step, is_marked, name)
