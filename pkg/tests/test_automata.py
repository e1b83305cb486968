from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from descoord.automata import (
    Alphabet,
    Generator,
    ProjectionSpec,
    accepts,
    accessible,
    coaccessible,
    difference,
    empty_generator,
    enumerate_bounded,
    from_words,
    generates,
    intersect,
    is_nonblocking,
    is_trim,
    language_equal,
    language_subset,
    lift,
    mark_all,
    normalize,
    prefix_closure,
    project,
    project_onto,
    shortest_marked_word,
    sync_product,
    sync_product_all,
    trim,
    union,
    universal_generator,
)
from descoord.errors import AlphabetMismatch, AttributeConflict, ValidationError
from descoord.fixtures import SIGMA, plant_g2, specification

import oracles
from strategies import LIGHT_SETTINGS, PROPERTY_SETTINGS, generators, sub_alphabets, universes


def closed(alphabet: Alphabet, *texts: str) -> Generator:
    return from_words(alphabet, [tuple(text.split()) for text in texts], closed=True)


def _all_words(events, length):
    if length == 0:
        return [()]
    return [word + (event,) for word in _all_words(events, length - 1) for event in events]


def test_alphabet_derives_complements() -> None:
    alphabet = Alphabet.build({"a", "u"}, uncontrollable={"u"}, unobservable={"a"})
    assert alphabet.uncontrollable == {"u"}
    assert alphabet.controllable == {"a"}
    assert alphabet.unobservable == {"a"}
    assert alphabet.restrict({"u", "zz"}).events == {"u"}


def test_alphabet_rejects_foreign_attributes() -> None:
    with pytest.raises(ValidationError):
        Alphabet(frozenset({"a"}), frozenset({"b"}), frozenset())
    with pytest.raises(ValidationError):
        Alphabet.build({""})


def test_merge_detects_conflicting_attributes() -> None:
    left = Alphabet.build({"a", "u"}, uncontrollable={"u"})
    right = Alphabet.build({"u", "b"})
    with pytest.raises(AttributeConflict):
        left.merge(right)

    hidden = Alphabet.build({"a"}, unobservable={"a"})
    with pytest.raises(AttributeConflict):
        Alphabet.build({"a"}).merge(hidden)


def test_generator_validates_structure() -> None:
    alphabet = Alphabet.build({"a"})
    with pytest.raises(ValidationError):
        Generator(alphabet, (0,), 1, frozenset(), {})
    with pytest.raises(ValidationError):
        Generator(alphabet, (0,), 0, frozenset(), {(0, "b"): 0})
    with pytest.raises(ValidationError):
        Generator(alphabet, (0,), 0, frozenset({3}), {})
    with pytest.raises(ValidationError):
        Generator(alphabet, (), 0, frozenset(), {})


def test_sync_product_interleaves_private_events() -> None:
    left = closed(Alphabet.build({"c", "u1"}), "c u1")
    right = closed(Alphabet.build({"c", "u2"}), "c u2")
    product = sync_product(left, right)
    expected = closed(product.alphabet, "c u1 u2", "c u2 u1")
    assert language_equal(product, expected)


def test_sync_product_with_universal_generator_is_neutral() -> None:
    g2 = plant_g2()
    assert language_equal(sync_product(g2, universal_generator(g2.alphabet)), g2)


def test_sync_product_merges_attributes() -> None:
    left = closed(Alphabet.build({"a", "u"}, uncontrollable={"u"}), "a u")
    right = closed(Alphabet.build({"b"}, unobservable={"b"}), "b")
    product = sync_product(left, right)
    assert product.alphabet.uncontrollable == {"u"}
    assert product.alphabet.unobservable == {"b"}


def test_sync_product_conflict() -> None:
    left = closed(Alphabet.build({"a"}), "a")
    right = closed(Alphabet.build({"a"}, uncontrollable={"a"}), "a")
    with pytest.raises(AttributeConflict):
        sync_product(left, right)


def test_projection_of_specification_onto_local_alphabet() -> None:
    k = specification()
    local = project(k, ProjectionSpec(SIGMA, {"a1", "a2", "c", "u", "u1"}))
    assert oracles.marked(local, 5) == oracles.closure(oracles.spell("a1 a2 u", "a2 a1", "c u1"))


def test_projection_onto_coordinator_events() -> None:
    projected = project_onto(specification(), {"a2", "c", "u"})
    assert oracles.generated(projected, 5) == oracles.closure(oracles.spell("a2 u", "c"))
    assert projected.alphabet.events == {"a2", "c", "u"}


def test_projection_alphabet_is_intersection() -> None:
    g2 = plant_g2()
    projected = project(g2, ProjectionSpec.onto(g2.alphabet, {"a1", "a2", "c", "u"}))
    assert projected.alphabet.events == {"a2", "c", "u"}


def test_identity_projection_preserves_languages() -> None:
    k = specification()
    assert language_equal(project(k, ProjectionSpec(k.alphabet, k.alphabet.events)), k)


def test_project_requires_matching_source() -> None:
    with pytest.raises(AlphabetMismatch):
        project(plant_g2(), ProjectionSpec(SIGMA, {"c"}))


def test_lift_self_loops_foreign_events() -> None:
    small = Alphabet.build({"a"})
    big = Alphabet.build({"a", "b"})
    lifted = lift(closed(small, "a"), big)
    expected = {
        word
        for length in range(4)
        for word in _all_words(("a", "b"), length)
        if word.count("a") <= 1
    }
    assert oracles.generated(lifted, 3) == frozenset(expected)
    assert language_equal(project_onto(lifted, {"a"}), closed(small, "a"))
    assert language_equal(lift(closed(small, "a"), small), closed(small, "a"))


def test_lift_rejects_smaller_or_conflicting_alphabets() -> None:
    g = closed(Alphabet.build({"a", "b"}), "a b")
    with pytest.raises(AlphabetMismatch):
        lift(g, Alphabet.build({"a"}))
    with pytest.raises(AttributeConflict):
        lift(g, Alphabet.build({"a", "b", "c"}, uncontrollable={"a"}))


def test_trim_removes_unreachable_and_dead_states() -> None:
    alphabet = Alphabet.build({"a", "b"})
    g = Generator(
        alphabet,
        (0, 1, 2, 3),
        0,
        frozenset({1, 3}),
        {(0, "a"): 1, (0, "b"): 2},
    )
    trimmed = trim(g)
    assert len(trimmed) == 2
    assert is_trim(trimmed)
    assert oracles.marked(trimmed, 3) == oracles.spell("a")
    assert len(accessible(g)) == 3
    # unreachable state 3 is coaccessible and survives
    assert len(coaccessible(g)) == 3
    assert language_equal(trim(trimmed), trimmed)


def test_trim_restores_specification_with_dead_branch() -> None:
    k = specification()
    dead = max(k.states) + 1
    transitions = dict(k.transitions)
    transitions[(k.initial, "u")] = dead
    extended = Generator(k.alphabet, k.states + (dead,), k.initial, k.marked, transitions)
    assert not language_equal(extended, k).generated
    restored = trim(extended)
    assert language_equal(restored, k)


def test_trim_may_yield_empty_generator() -> None:
    g = Generator(Alphabet.build({"a"}), (0,), 0, frozenset(), {})
    assert trim(g).is_empty


def test_prefix_closure() -> None:
    alphabet = Alphabet.build({"a", "b"})
    g = from_words(alphabet, [("a", "b")])
    assert oracles.marked(prefix_closure(g), 3) == oracles.spell("", "a", "a b")
    assert oracles.marked(prefix_closure(specification()), 5) == oracles.closure(
        oracles.spell("a1 a2 u", "a2 a1", "c u1 u2", "c u2 u1")
    )
    closed_g = prefix_closure(g)
    assert language_equal(prefix_closure(closed_g), closed_g)


def test_boolean_operations() -> None:
    alphabet = Alphabet.build({"a2", "c", "u"})
    g = closed(alphabet, "a2 u", "c")
    assert language_equal(intersect(g, g), g)
    assert difference(g, g).is_empty
    assert difference(g, g, "generated").is_empty
    other = closed(alphabet, "c u")
    both = union(g, other)
    assert oracles.marked(both, 3) == oracles.closure(oracles.spell("a2 u", "c u"))
    assert oracles.marked(difference(other, g), 3) == oracles.spell("c u")


def test_boolean_operations_require_same_alphabet() -> None:
    with pytest.raises(AlphabetMismatch):
        intersect(closed(Alphabet.build({"a"}), "a"), closed(Alphabet.build({"b"}), "b"))


def test_language_subset_reports_both_components() -> None:
    alphabet = Alphabet.build({"a", "b"})
    small = from_words(alphabet, [("a",)])
    large = from_words(alphabet, [("a",), ("a", "b")])
    comparison = language_subset(small, large)
    assert comparison.generated and comparison.marked
    assert not language_subset(large, small)
    assert language_subset(empty_generator(alphabet), small)


def test_nonblocking() -> None:
    alphabet = Alphabet.build({"a", "b"})
    assert is_nonblocking(closed(alphabet, "a b"))
    blocking = Generator(alphabet, (0, 1, 2), 0, frozenset({1}), {(0, "a"): 1, (0, "b"): 2})
    assert not is_nonblocking(blocking)
    assert is_nonblocking(empty_generator(alphabet))


def test_enumerate_bounded_on_second_plant() -> None:
    assert enumerate_bounded(plant_g2(), 2) == [
        ((), True),
        (("a2",), True),
        (("c",), True),
        (("a2", "u"), True),
        (("c", "u2"), True),
    ]
    assert enumerate_bounded(plant_g2(), 0) == [((), True)]
    assert enumerate_bounded(empty_generator(SIGMA), 3) == []
    with pytest.raises(ValueError):
        enumerate_bounded(plant_g2(), -1)


def test_word_helpers() -> None:
    g2 = plant_g2()
    assert accepts(g2, ("a2", "u"))
    assert generates(g2, ("c",))
    assert not generates(g2, ("u",))
    blocking = Generator(Alphabet.build({"a", "b"}), (0, 1, 2), 0, frozenset({2}), {(0, "b"): 1, (1, "a"): 2})
    assert shortest_marked_word(blocking) == ("b", "a")
    assert shortest_marked_word(empty_generator(SIGMA)) is None
    assert from_words(SIGMA, []).is_empty


def test_normalize_is_canonical() -> None:
    g2 = plant_g2()
    once = normalize(g2)
    assert once.states == (0, 1, 2, 3)
    assert normalize(once) == once
    assert language_equal(once, g2)


def test_mark_all_marks_generated_language() -> None:
    alphabet = Alphabet.build({"a"})
    g = Generator(alphabet, (0, 1), 0, frozenset(), {(0, "a"): 1})
    assert oracles.marked(mark_all(g), 2) == oracles.generated(g, 2)


@PROPERTY_SETTINGS
@given(st.data())
def test_projection_matches_erasure(data) -> None:
    universe = data.draw(universes())
    target = data.draw(st.sets(st.sampled_from(universe.sorted_events())))
    g = data.draw(generators(universe, max_states=3))
    projected = project_onto(g, target)
    # with three states a hidden stretch has at most two events
    erased = {oracles.erase(word, target) for word in oracles.generated(g, 6)}
    assert oracles.generated(projected, 2) == {word for word in erased if len(word) <= 2}
    erased_marked = {oracles.erase(word, target) for word in oracles.marked(g, 6)}
    assert oracles.marked(projected, 1) == {word for word in erased_marked if len(word) <= 1}


@PROPERTY_SETTINGS
@given(st.data())
def test_sync_product_is_commutative_and_associative(data) -> None:
    universe = data.draw(universes())
    g1 = data.draw(generators(data.draw(sub_alphabets(universe))))
    g2 = data.draw(generators(data.draw(sub_alphabets(universe))))
    g3 = data.draw(generators(data.draw(sub_alphabets(universe))))
    assert language_equal(sync_product(g1, g2), sync_product(g2, g1))
    assert language_equal(
        sync_product(sync_product(g1, g2), g3), sync_product(g1, sync_product(g2, g3))
    )
    assert language_equal(sync_product_all([g1, g2, g3]), sync_product(g1, sync_product(g2, g3)))


@PROPERTY_SETTINGS
@given(st.data())
def test_projection_distributes_over_product(data) -> None:
    universe = data.draw(universes(max_size=5))
    g1 = data.draw(generators(data.draw(sub_alphabets(universe))))
    g2 = data.draw(generators(data.draw(sub_alphabets(universe))))
    shared = g1.alphabet.events & g2.alphabet.events
    extra = data.draw(st.sets(st.sampled_from(universe.sorted_events())))
    target = shared | extra
    left = project_onto(sync_product(g1, g2), target)
    right = sync_product(project_onto(g1, target), project_onto(g2, target))
    assert language_equal(left, right)


@PROPERTY_SETTINGS
@given(st.data())
def test_lift_and_project_form_a_galois_pair(data) -> None:
    universe = data.draw(universes())
    small = data.draw(sub_alphabets(universe))
    g = data.draw(generators(small))
    lifted = lift(g, universe)
    assert language_equal(project(lifted, ProjectionSpec(universe, small.events)), g)

    h = data.draw(generators(universe))
    round_trip = lift(project_onto(h, small.events), universe)
    assert language_subset(h, round_trip)


@LIGHT_SETTINGS
@given(st.data())
def test_trim_preserves_marked_language(data) -> None:
    universe = data.draw(universes())
    g = data.draw(generators(universe))
    trimmed = trim(g)
    assert language_equal(trimmed, g).marked
    assert is_nonblocking(prefix_closure(g))
    assert oracles.marked(trimmed, 5) == oracles.marked(g, 5)
