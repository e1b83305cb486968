from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from descoord.automata import (
    Alphabet,
    Generator,
    ProjectionSpec,
    from_words,
    generates,
    intersect,
    mark_all,
    project_onto,
    sync_product,
    trim,
    union,
)
from descoord.errors import AlphabetMismatch, PreconditionViolated
from descoord.fixtures import SIGMA_1, SIGMA_K_SMALL, plant_g1, plant_g2, specification
from descoord.services.properties import (
    PropertyVerdict,
    Witness,
    is_controllable,
    is_lcc,
    is_lm_closed,
    is_normal,
    is_observable,
    is_observer,
    is_occ,
    is_relatively_observable,
    is_sync_nonconflicting,
    observer_violations,
)
from descoord.services.synthesis import SynthesisInput, sup_c, sup_n

import oracles
from strategies import (
    HEAVY_SETTINGS,
    LIGHT_SETTINGS,
    PROPERTY_SETTINGS,
    finite_generators,
    generators,
    sub_alphabets,
    universes,
)


def closed(alphabet: Alphabet, *texts: str) -> Generator:
    return from_words(alphabet, [tuple(text.split()) for text in texts], closed=True)


def marking(alphabet: Alphabet, *texts: str) -> Generator:
    return from_words(alphabet, [tuple(text.split()) for text in texts])


# a is observable and controllable, h is a hidden controllable event
HIDDEN = Alphabet.build({"a", "h"}, unobservable={"h"})


def test_failed_verdict_requires_witness() -> None:
    with pytest.raises(ValueError):
        PropertyVerdict("normal", False)
    verdict = PropertyVerdict.violated("normal", (("a",),)).on_side(2).renamed("normal P2+k")
    assert not verdict
    assert verdict.side == 2
    assert verdict.property == "normal P2+k"
    assert Witness((("a", "b"), ()), "u").describe() == "(a b, ε; u)"


def test_local_specification_is_not_controllable() -> None:
    gk = sync_product(project_onto(plant_g1(), SIGMA_K_SMALL), project_onto(plant_g2(), SIGMA_K_SMALL))
    local_plant = sync_product(plant_g1(), gk)
    local_spec = project_onto(specification(), SIGMA_1.events | SIGMA_K_SMALL)
    verdict = is_controllable(local_spec, local_plant)
    assert not verdict
    assert verdict.witness == Witness((("a2", "a1"),), "u")
    assert generates(local_plant, ("a2", "a1", "u"))


def test_plant_is_controllable_with_respect_to_itself() -> None:
    g1 = plant_g1()
    assert is_controllable(g1, g1)
    assert is_controllable(Generator(g1.alphabet, (), None, frozenset(), {}), g1)


def test_controllable_requires_one_alphabet() -> None:
    with pytest.raises(AlphabetMismatch):
        is_controllable(plant_g1(), plant_g2())


def test_hidden_choice_breaks_observability() -> None:
    plant = closed(HIDDEN, "a", "h a")
    k = closed(HIDDEN, "a", "h")
    verdict = is_observable(k, plant)
    assert not verdict
    assert verdict.witness == Witness((("h",), ()), "a")
    assert is_observable(closed(HIDDEN, "a", "h a"), plant)


def test_normality_witness_and_outside_detail() -> None:
    plant = closed(HIDDEN, "a", "h a")
    verdict = is_normal(closed(HIDDEN, "a", "h"), plant)
    assert not verdict
    assert verdict.witness.words == (("h", "a"),)

    outside = is_normal(closed(HIDDEN, "a a"), plant)
    assert not outside
    assert outside.witness.words == (("a", "a"),)
    assert "not contained" in outside.detail

    assert is_normal(plant, plant)


def test_normality_with_explicit_projection() -> None:
    alphabet = Alphabet.build({"a", "u"})
    plant = closed(alphabet, "a u", "u")
    k = closed(alphabet, "a u")
    assert is_normal(k, plant)
    verdict = is_normal(k, plant, ProjectionSpec(alphabet, {"a"}))
    assert not verdict
    assert verdict.witness.words == (("u",),)
    with pytest.raises(AlphabetMismatch):
        is_normal(k, plant, ProjectionSpec(HIDDEN, {"a"}))


def test_relative_observability_covers_uncontrollable_events() -> None:
    alphabet = Alphabet.build({"a", "h"}, uncontrollable={"a"}, unobservable={"h"})
    plant = closed(alphabet, "a", "h a")
    k = closed(alphabet, "a", "h")
    assert is_observable(k, plant)
    verdict = is_relatively_observable(k, k, plant)
    assert not verdict
    assert verdict.witness == Witness(((), ("h",)), "a")


def test_relative_observability_preconditions() -> None:
    plant = closed(HIDDEN, "a", "h a")
    with pytest.raises(PreconditionViolated):
        is_relatively_observable(closed(HIDDEN, "a"), closed(HIDDEN, "h"), plant)
    with pytest.raises(PreconditionViolated):
        is_relatively_observable(closed(HIDDEN, "a"), closed(HIDDEN, "a a"), plant)


def test_lm_closedness() -> None:
    alphabet = Alphabet.build({"a", "b"})
    plant = marking(alphabet, "a", "a b")
    assert is_lm_closed(marking(alphabet, "a"), plant)
    assert is_lm_closed(marking(alphabet, "a", "a b"), plant)

    verdict = is_lm_closed(marking(alphabet, "a b"), plant)
    assert not verdict
    assert verdict.witness.words == (("a",),)

    outside = is_lm_closed(closed(alphabet, "a b"), marking(alphabet, "a b"))
    assert not outside
    assert outside.witness.words == ((),)
    assert outside.detail


def test_synchronous_nonconflict() -> None:
    alphabet = Alphabet.build({"a", "b", "c", "d"})
    k1 = marking(alphabet, "c a b", "d")
    k2 = marking(alphabet, "c b a", "d")
    verdict = is_sync_nonconflicting(k1, k2)
    assert not verdict
    assert verdict.witness.words == (("c",),)

    left = marking(Alphabet.build({"a", "b"}), "a b")
    right = marking(Alphabet.build({"b", "c"}), "b c")
    assert is_sync_nonconflicting(left, right)


def _hidden_branch() -> Generator:
    alphabet = Alphabet.build({"a", "b", "h"})
    return Generator(
        alphabet,
        (0, 1, 2, 3),
        0,
        frozenset({1, 3}),
        {(0, "a"): 1, (0, "h"): 2, (2, "b"): 3},
    )


def test_observer_violation_witness() -> None:
    g = _hidden_branch()
    p = ProjectionSpec(g.alphabet, {"a", "b"})
    verdict = is_observer(p, g)
    assert not verdict
    assert verdict.witness.words == (("h",), ("a",))
    assert observer_violations(p, g) == [Witness((("h",), ("a",)))]
    assert is_observer(ProjectionSpec(g.alphabet, {"a", "b", "h"}), g)
    assert is_observer(ProjectionSpec(g.alphabet, {"a", "h"}), g)


def test_observer_requires_trim_generator() -> None:
    alphabet = Alphabet.build({"a", "b"})
    g = Generator(alphabet, (0, 1, 2), 0, frozenset({1}), {(0, "a"): 1, (0, "b"): 2})
    with pytest.raises(PreconditionViolated):
        is_observer(ProjectionSpec(alphabet, {"a"}), g)


@pytest.mark.parametrize("uncontrollable, holds", [({"u"}, False), ({"h", "u"}, True)])
def test_output_and_local_control_consistency(uncontrollable, holds) -> None:
    alphabet = Alphabet.build({"h", "u"}, uncontrollable=uncontrollable)
    g = closed(alphabet, "h u")
    p = ProjectionSpec(alphabet, {"u"})
    occ = is_occ(p, g)
    lcc = is_lcc(p, g)
    assert bool(occ) is holds
    assert bool(lcc) is holds
    if not holds:
        assert occ.witness == Witness((("h", "u"),), "u")
        assert lcc.witness == Witness(((),), "u")


def test_lcc_is_weaker_than_occ() -> None:
    # a controllable hidden step before u, but u is also reachable without it
    alphabet = Alphabet.build({"h", "v", "u"}, uncontrollable={"u", "v"})
    g = closed(alphabet, "h u", "v u")
    p = ProjectionSpec(alphabet, {"u"})
    assert not is_occ(p, g)
    assert is_lcc(p, g)


@HEAVY_SETTINGS
@given(st.data())
def test_controllability_matches_brute_force(data) -> None:
    universe = data.draw(universes())
    k = data.draw(finite_generators(universe))
    plant = data.draw(finite_generators(universe, closed=True))
    expected = oracles.is_controllable(
        oracles.marked(k, 3), oracles.generated(plant, 3), universe.uncontrollable
    )
    verdict = is_controllable(k, plant)
    assert verdict.holds is expected
    if not verdict.holds:
        (word,) = verdict.witness.words
        assert generates(plant, word + (verdict.witness.event,))
        assert not generates(trim(k), word + (verdict.witness.event,))


@HEAVY_SETTINGS
@given(st.data())
def test_normality_matches_brute_force(data) -> None:
    universe = data.draw(universes())
    k = data.draw(finite_generators(universe))
    plant = data.draw(finite_generators(universe, closed=True))
    expected = oracles.is_normal(
        oracles.marked(k, 3), oracles.generated(plant, 3), universe.observable
    )
    assert is_normal(k, plant).holds is expected


@HEAVY_SETTINGS
@given(st.data())
def test_observability_matches_brute_force(data) -> None:
    universe = data.draw(universes())
    k = data.draw(finite_generators(universe))
    plant = data.draw(finite_generators(universe, closed=True))
    expected = oracles.is_observable(
        oracles.marked(k, 3),
        oracles.generated(plant, 3),
        universe.observable,
        universe.controllable,
    )
    verdict = is_observable(k, plant)
    assert verdict.holds is expected
    if not verdict.holds:
        s, t = verdict.witness.words
        p = ProjectionSpec.observation(universe)
        assert p.apply(s) == p.apply(t)


@PROPERTY_SETTINGS
@given(st.data())
def test_normal_sublanguages_are_observable(data) -> None:
    universe = data.draw(universes())
    plant = data.draw(finite_generators(universe, closed=True))
    k = intersect(data.draw(finite_generators(universe)), plant)
    if is_normal(k, plant):
        assert is_observable(k, plant)


@PROPERTY_SETTINGS
@given(st.data())
def test_relative_observability_is_stronger_than_observability(data) -> None:
    universe = data.draw(universes())
    plant = data.draw(finite_generators(universe, closed=True))
    k = intersect(data.draw(finite_generators(universe)), plant)
    c = union(k, intersect(data.draw(finite_generators(universe)), plant))
    if is_relatively_observable(k, c, plant):
        assert is_relatively_observable(k, k, plant)
        assert is_observable(k, plant)


@LIGHT_SETTINGS
@given(st.data())
def test_trivial_projections_are_observers(data) -> None:
    universe = data.draw(universes())
    g = trim(data.draw(generators(universe)))
    assert is_observer(ProjectionSpec(universe, universe.events), g)
    assert is_observer(ProjectionSpec(universe, ()), g)


@PROPERTY_SETTINGS
@given(st.data())
def test_occ_implies_lcc(data) -> None:
    universe = data.draw(universes())
    g = data.draw(generators(universe))
    target = data.draw(st.sets(st.sampled_from(universe.sorted_events())))
    p = ProjectionSpec(universe, target)
    if is_occ(p, g):
        assert is_lcc(p, g)


def _component_plants(data) -> tuple:
    universe = data.draw(universes(min_size=2))
    return tuple(
        data.draw(finite_generators(data.draw(sub_alphabets(universe)), closed=True))
        for _ in range(2)
    )


@HEAVY_SETTINGS
@given(st.data())
def test_controllability_survives_composition(data) -> None:
    l1, l2 = _component_plants(data)
    k1 = sup_c(SynthesisInput(data.draw(finite_generators(l1.alphabet)), l1))
    k2 = sup_c(SynthesisInput(data.draw(finite_generators(l2.alphabet)), l2))
    if is_controllable(k1, l1) and is_controllable(k2, l2) and is_sync_nonconflicting(k1, k2):
        assert is_controllable(sync_product(k1, k2), sync_product(l1, l2))


@HEAVY_SETTINGS
@given(st.data())
def test_observability_survives_composition(data) -> None:
    l1, l2 = _component_plants(data)
    k1 = intersect(data.draw(finite_generators(l1.alphabet)), l1)
    k2 = intersect(data.draw(finite_generators(l2.alphabet)), l2)
    if is_observable(k1, l1) and is_observable(k2, l2) and is_sync_nonconflicting(k1, k2):
        assert is_observable(sync_product(k1, k2), sync_product(l1, l2))


@HEAVY_SETTINGS
@given(st.data())
def test_normality_survives_composition(data) -> None:
    l1, l2 = _component_plants(data)
    parts = []
    for plant in (l1, l2):
        spec = intersect(data.draw(finite_generators(plant.alphabet)), plant)
        if data.draw(st.booleans()):
            spec = sup_n(SynthesisInput(spec, plant, ProjectionSpec.observation(plant.alphabet)))
        parts.append(spec)
    k1, k2 = parts
    if is_normal(k1, l1) and is_normal(k2, l2) and is_sync_nonconflicting(k1, k2):
        assert is_normal(sync_product(k1, k2), sync_product(l1, l2))


@HEAVY_SETTINGS
@given(st.data())
def test_observers_compose_over_shared_events(data) -> None:
    universe = data.draw(universes(min_size=2))
    g1 = mark_all(data.draw(generators(data.draw(sub_alphabets(universe)), max_states=3)))
    g2 = mark_all(data.draw(generators(data.draw(sub_alphabets(universe)), max_states=3)))
    events = g1.alphabet.events | g2.alphabet.events
    target = (g1.alphabet.events & g2.alphabet.events) | data.draw(
        st.sets(st.sampled_from(sorted(events)))
    )
    local = all(is_observer(ProjectionSpec.onto(g.alphabet, target), g) for g in (g1, g2))
    if local:
        whole = mark_all(sync_product(g1, g2))
        assert is_observer(ProjectionSpec.onto(whole.alphabet, target), whole)
