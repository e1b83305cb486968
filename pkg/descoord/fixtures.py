"""Two-subsystem worked example with a shared uncontrollable event.

Subsystem 1 either does ``a1`` followed by the shared ``u`` or the shared ``c``
followed by its private ``u1``; subsystem 2 mirrors it with ``a2`` and ``u2``.
The specification forbids ``u`` after ``a2 a1`` and otherwise lets both
subsystems react to ``c`` in any order.
"""

from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Iterable, List, Tuple

from descoord.automata import Alphabet, Generator, Word, from_words
from descoord.services.coordination import CoordinationProblem, Observation

SIGMA_1 = Alphabet.build({"a1", "c", "u", "u1"}, uncontrollable={"u", "u1"})
SIGMA_2 = Alphabet.build({"a2", "c", "u", "u2"}, uncontrollable={"u", "u2"})
SIGMA = SIGMA_1.merge(SIGMA_2)

SIGMA_K_SMALL: FrozenSet[str] = frozenset({"a2", "c", "u"})
SIGMA_K_LARGE: FrozenSet[str] = frozenset({"a1", "a2", "c", "u"})


def words(*spelled: str) -> Tuple[Word, ...]:
    """``words("a1 a2 u", "c")`` -> (("a1", "a2", "u"), ("c",))."""

    return tuple(tuple(text.split()) for text in spelled)


def closed_language(alphabet: Alphabet, spelled: Iterable[str], name: str = "") -> Generator:
    return from_words(alphabet, words(*spelled), closed=True, name=name)


def _chain_plant(name: str, alphabet: Alphabet, first: str, own: str) -> Generator:
    states = ("s0", "s1", "s2", "s3")
    transitions = {
        ("s0", first): "s1",
        ("s1", "u"): "s2",
        ("s0", "c"): "s3",
        ("s3", own): "s2",
    }
    return Generator(alphabet, states, "s0", frozenset(states), transitions, name)


def plant_g1() -> Generator:
    return _chain_plant("G1", SIGMA_1, "a1", "u1")


def plant_g2() -> Generator:
    return _chain_plant("G2", SIGMA_2, "a2", "u2")


def specification() -> Generator:
    return closed_language(SIGMA, ["a1 a2 u", "a2 a1", "c u1 u2", "c u2 u1"], "K")


def worked_example(
    sigma_k: Iterable[str] = SIGMA_K_SMALL, observation: Observation = Observation.FULL
) -> CoordinationProblem:
    return CoordinationProblem(plant_g1(), plant_g2(), specification(), frozenset(sigma_k), observation)


# Languages quoted for the example, all prefix-closed, keyed by (Σk case, artefact).
PRINTED_LANGUAGES: Dict[Tuple[str, str], Tuple[str, ...]] = {
    ("small", "P1+k(K)"): ("a1 a2 u", "a2 a1", "c u1"),
    ("small", "P2+k(K)"): ("a2 u", "c u2"),
    ("small", "sup1+k"): ("a1 a2 u", "a2", "c u1"),
    ("small", "sup2+k"): ("a2 u", "c u2"),
    ("large", "P1+k(K)"): ("a1 a2 u", "a2 a1", "c u1"),
    ("large", "P2+k(K)"): ("a1 a2 u", "a2 a1", "c u2"),
    ("large", "sup1+k"): ("a1 a2 u", "a2", "c u1"),
    ("large", "sup2+k"): ("a1 a2 u", "a2", "c u2"),
}

FINAL_LANGUAGE: Tuple[str, ...] = ("a1 a2 u", "a2", "c u1 u2", "c u2 u1")

SIGMA_K_CASES: Dict[str, FrozenSet[str]] = {"small": SIGMA_K_SMALL, "large": SIGMA_K_LARGE}

FIXTURES: Dict[str, Callable[[], Generator]] = {
    "g1": plant_g1,
    "g2": plant_g2,
    "spec": specification,
}


def fixture_names() -> List[str]:
    return sorted(FIXTURES)
