from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, Mapping, Optional, Tuple

from descoord.errors import AttributeConflict, ValidationError

EventId = str
State = Hashable
Word = Tuple[EventId, ...]


@dataclass(frozen=True)
class Alphabet:
    """Event set with its controllable and observable subsets."""

    events: FrozenSet[EventId]
    controllable: FrozenSet[EventId]
    observable: FrozenSet[EventId]

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "controllable", frozenset(self.controllable))
        object.__setattr__(self, "observable", frozenset(self.observable))
        for event in self.events:
            if not isinstance(event, str) or not event:
                raise ValidationError(f"event names must be nonempty strings, got {event!r}")
        if not self.controllable <= self.events:
            raise ValidationError("controllable events must belong to the alphabet")
        if not self.observable <= self.events:
            raise ValidationError("observable events must belong to the alphabet")

    @classmethod
    def build(
        cls,
        events: Iterable[EventId],
        *,
        uncontrollable: Iterable[EventId] = (),
        unobservable: Iterable[EventId] = (),
    ) -> "Alphabet":
        """Build an alphabet where everything is controllable and observable by default."""

        all_events = frozenset(events)
        return cls(
            events=all_events,
            controllable=all_events - frozenset(uncontrollable),
            observable=all_events - frozenset(unobservable),
        )

    @property
    def uncontrollable(self) -> FrozenSet[EventId]:
        return self.events - self.controllable

    @property
    def unobservable(self) -> FrozenSet[EventId]:
        return self.events - self.observable

    def sorted_events(self) -> Tuple[EventId, ...]:
        return tuple(sorted(self.events))

    def restrict(self, events: Iterable[EventId]) -> "Alphabet":
        """Sub-alphabet on ``events ∩ self.events`` with inherited attributes."""

        kept = self.events & frozenset(events)
        return Alphabet(kept, self.controllable & kept, self.observable & kept)

    def merge(self, other: "Alphabet") -> "Alphabet":
        shared = self.events & other.events
        for event in sorted(shared):
            if (event in self.controllable) != (event in other.controllable):
                raise AttributeConflict(f"event {event!r} has contradictory controllability")
            if (event in self.observable) != (event in other.observable):
                raise AttributeConflict(f"event {event!r} has contradictory observability")
        return Alphabet(
            self.events | other.events,
            self.controllable | other.controllable,
            self.observable | other.observable,
        )


@dataclass(frozen=True)
class ProjectionSpec:
    """Natural projection from ``source`` onto ``target_events``."""

    source: Alphabet
    target_events: FrozenSet[EventId]

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_events", frozenset(self.target_events))
        if not self.target_events <= self.source.events:
            unknown = sorted(self.target_events - self.source.events)
            raise ValidationError(f"projection targets unknown events {unknown}")

    @classmethod
    def onto(cls, source: Alphabet, events: Iterable[EventId]) -> "ProjectionSpec":
        """Projection onto ``events ∩ source.events`` (foreign names are dropped)."""

        return cls(source, source.events & frozenset(events))

    @classmethod
    def observation(cls, source: Alphabet) -> "ProjectionSpec":
        return cls(source, source.observable)

    @property
    def target(self) -> Alphabet:
        return self.source.restrict(self.target_events)

    @property
    def hidden_events(self) -> FrozenSet[EventId]:
        return self.source.events - self.target_events

    def apply(self, word: Iterable[EventId]) -> Word:
        return tuple(event for event in word if event in self.target_events)


@dataclass(frozen=True, eq=False)
class Generator:
    """Deterministic finite generator G = (Q, Σ, f, q0, Qm) with partial transitions.

    A generator without states represents the empty language pair; its ``initial``
    is ``None``.
    """

    alphabet: Alphabet
    states: Tuple[State, ...]
    initial: Optional[State]
    marked: FrozenSet[State]
    transitions: Mapping[Tuple[State, EventId], State]
    name: str = ""
    _delta: Dict[State, Dict[EventId, State]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "marked", frozenset(self.marked))
        object.__setattr__(self, "transitions", dict(self.transitions))
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValidationError("duplicate state ids")
        if self.states:
            if self.initial not in known:
                raise ValidationError(f"initial state {self.initial!r} is not a state")
        elif self.initial is not None:
            raise ValidationError("a generator without states has no initial state")
        if not self.marked <= known:
            raise ValidationError("marked states must be states")
        delta: Dict[State, Dict[EventId, State]] = {state: {} for state in self.states}
        for (source, event), target in self.transitions.items():
            if event not in self.alphabet.events:
                raise ValidationError(f"transition on unknown event {event!r}")
            if source not in known or target not in known:
                raise ValidationError(f"transition {source!r} -{event}-> {target!r} uses unknown states")
            delta[source][event] = target
        object.__setattr__(self, "_delta", delta)

    @property
    def is_empty(self) -> bool:
        return not self.states

    def successors(self, state: State) -> Mapping[EventId, State]:
        return self._delta[state]

    def step(self, state: Optional[State], event: EventId) -> Optional[State]:
        if state is None:
            return None
        return self._delta[state].get(event)

    def run(self, word: Iterable[EventId]) -> Optional[State]:
        state = self.initial
        for event in word:
            state = self.step(state, event)
            if state is None:
                return None
        return state

    def restarted(self, state: State) -> "Generator":
        """Same automaton with ``state`` as initial state."""

        return Generator(
            self.alphabet, self.states, state, self.marked, self.transitions, self.name
        )

    def renamed(self, name: str) -> "Generator":
        return Generator(
            self.alphabet, self.states, self.initial, self.marked, self.transitions, name
        )

    def structure(self) -> tuple:
        """Hashable structural fingerprint (used for structural equality)."""

        return (
            self.alphabet,
            frozenset(self.states),
            self.initial,
            self.marked,
            frozenset(self.transitions.items()),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Generator):
            return NotImplemented
        return self.structure() == other.structure()

    def __hash__(self) -> int:
        return hash(self.structure())

    def __len__(self) -> int:
        return len(self.states)
