"""Supremal controllable and normal sublanguages.

All three operations share one pruning engine. It explores the product of the
trimmed specification with the plant. When normality is involved it also tracks
the observation estimate: the set of (specification state or ``OUT``, plant state)
pairs reachable by plant words with the same projection. Nodes are deleted until
nothing changes:

* controllability deletes nodes where the plant enables an uncontrollable event
  whose successor is gone;
* coaccessibility deletes nodes that can no longer reach a marked node;
* normality deletes every node sharing an estimate with a deleted node, and every
  estimate that contains a plant word outside the candidate from the start.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Optional, Set, Tuple

from descoord.automata import (
    Generator,
    ProjectionSpec,
    empty_generator,
    mark_all,
    prefix_closure,
    trim,
)
from descoord.errors import AlphabetMismatch, MissingProjection

LOGGER = logging.getLogger(__name__)


class _Out:
    """Specification component of plant words that left the candidate."""

    def __repr__(self) -> str:
        return "OUT"


OUT = _Out()

Pair = Tuple[Hashable, Hashable]
Node = Tuple[Hashable, Hashable, Optional[FrozenSet[Pair]]]


@dataclass(frozen=True)
class SynthesisInput:
    spec: Generator
    plant: Generator
    projection: Optional[ProjectionSpec] = None

    def __post_init__(self) -> None:
        if self.spec.alphabet != self.plant.alphabet:
            raise AlphabetMismatch("specification and plant must share one alphabet; lift first")
        if self.projection is not None and self.projection.source != self.spec.alphabet:
            raise AlphabetMismatch("projection source differs from the synthesis alphabet")

    def require_projection(self) -> ProjectionSpec:
        if self.projection is None:
            raise MissingProjection("normality needs a projection")
        return self.projection


class _PruningEngine:
    def __init__(
        self,
        spec: Generator,
        plant: Generator,
        projection: Optional[ProjectionSpec],
        *,
        controllability: bool,
    ) -> None:
        self._spec = trim(spec)
        self._plant = plant
        self._projection = projection
        self._controllability = controllability
        self._uncontrollable = sorted(spec.alphabet.uncontrollable)
        self._events = spec.alphabet.sorted_events()
        self._nodes: List[Node] = []
        self._edges: Dict[Node, Dict[str, Node]] = {}
        self._plant_moves: Dict[Node, Set[str]] = {}

    def _pair_step(self, pair: Pair, event: str) -> Optional[Pair]:
        x, y = pair
        ny = self._plant.step(y, event)
        if ny is None:
            return None
        if x is OUT:
            return (OUT, ny)
        nx = self._spec.step(x, event)
        return (OUT if nx is None else nx, ny)

    def _closure(self, pairs: Set[Pair]) -> FrozenSet[Pair]:
        assert self._projection is not None
        hidden = self._projection.hidden_events
        seen = set(pairs)
        stack = list(pairs)
        while stack:
            pair = stack.pop()
            for event in hidden:
                target = self._pair_step(pair, event)
                if target is not None and target not in seen:
                    seen.add(target)
                    stack.append(target)
        return frozenset(seen)

    def _estimate_step(self, estimate: FrozenSet[Pair], event: str) -> FrozenSet[Pair]:
        moved = {self._pair_step(pair, event) for pair in estimate}
        moved.discard(None)
        return self._closure(moved)  # type: ignore[arg-type]

    def _explore(self) -> Optional[Node]:
        if self._spec.is_empty or self._plant.is_empty:
            return None
        start_pair: Pair = (self._spec.initial, self._plant.initial)
        estimate = self._closure({start_pair}) if self._projection is not None else None
        initial: Node = (start_pair[0], start_pair[1], estimate)
        self._edges[initial] = {}
        queue = deque([initial])
        self._nodes.append(initial)
        while queue:
            node = queue.popleft()
            x, y, estimate = node
            moves: Set[str] = set()
            for event in self._events:
                target = self._pair_step((x, y), event)
                if target is None:
                    continue
                moves.add(event)
                if target[0] is OUT:
                    continue
                if estimate is not None and event in self._projection.target_events:  # type: ignore[union-attr]
                    next_estimate: Optional[FrozenSet[Pair]] = self._estimate_step(estimate, event)
                else:
                    next_estimate = estimate
                successor: Node = (target[0], target[1], next_estimate)
                if successor not in self._edges:
                    self._edges[successor] = {}
                    self._nodes.append(successor)
                    queue.append(successor)
                self._edges[node][event] = successor
            self._plant_moves[node] = moves
        return initial

    def _reachable(self, initial: Node, removed: Set[Node]) -> Set[Node]:
        if initial in removed:
            return set()
        seen = {initial}
        stack = [initial]
        while stack:
            node = stack.pop()
            for target in self._edges[node].values():
                if target not in removed and target not in seen:
                    seen.add(target)
                    stack.append(target)
        return seen

    def _is_marked(self, node: Node) -> bool:
        return node[0] in self._spec.marked and node[1] in self._plant.marked

    def _blocking(self, alive: Set[Node]) -> Set[Node]:
        predecessors: Dict[Node, List[Node]] = {node: [] for node in alive}
        for node in alive:
            for target in self._edges[node].values():
                if target in alive:
                    predecessors[target].append(node)
        good = {node for node in alive if self._is_marked(node)}
        stack = list(good)
        while stack:
            node = stack.pop()
            for previous in predecessors[node]:
                if previous not in good:
                    good.add(previous)
                    stack.append(previous)
        return alive - good

    def _uncontrollable_exits(self, alive: Set[Node]) -> Set[Node]:
        bad = set()
        for node in alive:
            moves = self._plant_moves[node]
            edges = self._edges[node]
            for event in self._uncontrollable:
                if event in moves and edges.get(event) not in alive:
                    bad.add(node)
                    break
        return bad

    def run(self) -> Generator:
        alphabet = self._spec.alphabet
        initial = self._explore()
        if initial is None:
            return empty_generator(alphabet)

        normality = self._projection is not None
        removed: Set[Node] = set()
        if normality:
            tainted = {node[2] for node in self._nodes if any(x is OUT for x, _ in node[2])}  # type: ignore[union-attr]
            removed = {node for node in self._nodes if node[2] in tainted}

        rounds = 0
        while True:
            rounds += 1
            alive = self._reachable(initial, removed)
            doomed: Set[Node] = set()
            if self._controllability:
                doomed |= self._uncontrollable_exits(alive)
            doomed |= self._blocking(alive - doomed)
            if normality and doomed:
                classes = {node[2] for node in doomed}
                doomed |= {node for node in self._nodes if node[2] in classes}
            doomed -= removed
            if not doomed:
                break
            removed |= doomed

        alive = self._reachable(initial, removed)
        LOGGER.debug(
            "pruning_finished",
            extra={"nodes": len(self._nodes), "kept": len(alive), "rounds": rounds},
        )
        if not alive:
            return empty_generator(alphabet)
        transitions = {
            (node, event): target
            for node in alive
            for event, target in self._edges[node].items()
            if target in alive
        }
        marked = frozenset(node for node in alive if self._is_marked(node))
        raw = Generator(alphabet, tuple(alive), initial, marked, transitions)
        return trim(raw)


def sup_c(data: SynthesisInput) -> Generator:
    """Supremal sublanguage of K ∩ L_m(plant) controllable with respect to L(plant) and Σu."""

    return _PruningEngine(data.spec, data.plant, None, controllability=True).run()


def sup_n(data: SynthesisInput) -> Generator:
    """Supremal prefix-closed sublanguage of closure(K) normal with respect to L(plant)."""

    projection = data.require_projection()
    return _PruningEngine(
        prefix_closure(data.spec), mark_all(data.plant), projection, controllability=False
    ).run()


def sup_cn(data: SynthesisInput) -> Generator:
    projection = data.require_projection()
    return _PruningEngine(data.spec, data.plant, projection, controllability=True).run()
