"""Line-oriented ``.gen`` text format for generators.

Example::

    # plant of the second subsystem
    name: G2
    events: a2 c u:u u2:u
    states: s0 s1 s3 s2
    initial: s0
    marked: s0 s1 s3 s2
    trans:
      s0 a2 s1
      s0 c s3

Event entries are ``name[:c|:u][:o|:uo]`` (controllable and observable by
default). Section values may continue on the following lines. ``#`` starts a
comment.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from descoord.automata import Alphabet, Generator
from descoord.errors import ParseError, ValidationError

SECTIONS = ("name", "events", "states", "initial", "marked", "trans")
_HEADER = re.compile(r"^\s*([A-Za-z_]+)\s*:(.*)$")
_TOKEN = re.compile(r"\S+")


@dataclass
class _Token:
    text: str
    line: int
    column: int


@dataclass
class _Section:
    line: int
    tokens: List[_Token] = field(default_factory=list)
    rows: List[List[_Token]] = field(default_factory=list)


def _tokens(text: str, line: int, offset: int) -> List[_Token]:
    return [_Token(m.group(0), line, offset + m.start() + 1) for m in _TOKEN.finditer(text)]


def _split_sections(text: str) -> Dict[str, _Section]:
    sections: Dict[str, _Section] = {}
    current: Optional[_Section] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        header = _HEADER.match(content)
        if header is not None and header.group(1) not in SECTIONS and current is None:
            key = header.group(1)
            raise ParseError(f"unknown section {key!r}", number, content.index(key) + 1)
        if header is not None and header.group(1) in SECTIONS:
            key = header.group(1)
            if key in sections:
                raise ParseError(f"duplicate section {key!r}", number)
            current = sections[key] = _Section(number)
            rest = header.group(2)
            found = _tokens(rest, number, header.start(2))
            if found:
                current.tokens.extend(found)
                current.rows.append(found)
            continue
        if current is None:
            column = len(content) - len(content.lstrip()) + 1
            raise ParseError("content before the first section", number, column)
        found = _tokens(content, number, 0)
        current.tokens.extend(found)
        current.rows.append(found)
    return sections


def _parse_event(token: _Token) -> Tuple[str, bool, bool]:
    name, *flags = token.text.split(":")
    if not name:
        raise ParseError("empty event name", token.line, token.column)
    controllable = observable = True
    for flag in flags:
        if flag == "c":
            controllable = True
        elif flag == "u":
            controllable = False
        elif flag == "o":
            observable = True
        elif flag == "uo":
            observable = False
        else:
            raise ParseError(f"unknown event flag {flag!r}", token.line, token.column)
    return name, controllable, observable


def parse_generator(text: str) -> Generator:
    sections = _split_sections(text)
    empty = _Section(0)

    names = sections.get("name", empty).tokens
    name = " ".join(token.text for token in names)

    events: List[str] = []
    controllable: List[str] = []
    observable: List[str] = []
    for token in sections.get("events", empty).tokens:
        event, is_controllable, is_observable = _parse_event(token)
        if event in events:
            raise ValidationError(f"duplicate event {event!r}", token.line)
        events.append(event)
        if is_controllable:
            controllable.append(event)
        if is_observable:
            observable.append(event)
    alphabet = Alphabet(frozenset(events), frozenset(controllable), frozenset(observable))

    states: List[str] = []
    for token in sections.get("states", empty).tokens:
        if token.text in states:
            raise ValidationError(f"duplicate state {token.text!r}", token.line)
        states.append(token.text)
    known = set(states)

    initial_tokens = sections.get("initial", empty).tokens
    if len(initial_tokens) > 1:
        extra = initial_tokens[1]
        raise ParseError("exactly one initial state expected", extra.line, extra.column)
    initial: Optional[str] = initial_tokens[0].text if initial_tokens else None
    if states and initial is None:
        raise ValidationError("missing initial state", sections.get("initial", empty).line or None)
    if initial is not None and initial not in known:
        raise ValidationError(f"initial state {initial!r} is not declared", initial_tokens[0].line)

    marked = []
    for token in sections.get("marked", empty).tokens:
        if token.text not in known:
            raise ValidationError(f"marked state {token.text!r} is not declared", token.line)
        marked.append(token.text)

    transitions: Dict[Tuple[str, str], str] = {}
    for row in sections.get("trans", empty).rows:
        if len(row) != 3:
            culprit = row[3] if len(row) > 3 else row[-1]
            raise ParseError("transition needs 'source event target'", culprit.line, culprit.column)
        source, event, target = (token.text for token in row)
        line = row[0].line
        if event not in alphabet.events:
            raise ValidationError(f"unknown event {event!r}", line)
        if source not in known or target not in known:
            raise ValidationError(f"transition {source} {event} {target} uses an undeclared state", line)
        if (source, event) in transitions:
            raise ValidationError(f"nondeterministic transitions from {source!r} on {event!r}", line)
        transitions[(source, event)] = target

    return Generator(alphabet, tuple(states), initial, frozenset(marked), transitions, name)


def _state_order(g: Generator) -> List:
    if g.is_empty:
        return []
    events = g.alphabet.sorted_events()
    order = [g.initial]
    seen = {g.initial}
    queue = deque([g.initial])
    while queue:
        state = queue.popleft()
        successors = g.successors(state)
        for event in events:
            target = successors.get(event)
            if target is not None and target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    order.extend(state for state in g.states if state not in seen)
    return order


def _event_entry(alphabet: Alphabet, event: str) -> str:
    entry = event
    if event not in alphabet.controllable:
        entry += ":u"
    if event not in alphabet.observable:
        entry += ":uo"
    return entry


def serialize_generator(g: Generator) -> str:
    order = _state_order(g)
    index = {state: i for i, state in enumerate(order)}
    events = g.alphabet.sorted_events()

    def line(section: str, values: List[str]) -> str:
        return f"{section}: {' '.join(values)}".rstrip()

    lines = [
        line("name", [g.name] if g.name else []),
        line("events", [_event_entry(g.alphabet, event) for event in events]),
        line("states", [str(state) for state in order]),
        line("initial", [str(g.initial)] if not g.is_empty else []),
        line("marked", [str(state) for state in order if state in g.marked]),
        "trans:",
    ]
    rank = {event: i for i, event in enumerate(events)}
    for (source, event), target in sorted(
        g.transitions.items(), key=lambda item: (index[item[0][0]], rank[item[0][1]])
    ):
        lines.append(f"  {source} {event} {target}")
    return "\n".join(lines) + "\n"
