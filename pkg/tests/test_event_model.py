import pytest

from conftest import fixture_names
from core.config import Settings
from core.errors import TooManyAtomsError, UnresolvedReferenceError
from core.factory import ServiceFactory
from core.models import AtomKind, CausalHypothesis, Entity, Observer, ObserverIdentity
from scenario_builders import event, loc, scenario, token
from services.event_model import EGO, ResolvedScenario, enumerate_sequences, validate_scenario


def test_atoms_of_the_double_suicide(load):
    resolved = ResolvedScenario(load("double_suicide"))
    labels = [atom.label for atom in resolved.base_atoms]
    assert len(labels) == 12
    assert labels[:6] == [
        "instantiate(e1.age_band=late-middle-age)",
        "instantiate(e1.dress=elegant-dress)",
        "instantiate(e1.method=walked-into-sea)",
        "instantiate(e1.daypart=early-morning)",
        "locate(e1.north-beach)",
        "timestamp(e1.t=0)",
    ]
    assert [atom.index for atom in resolved.base_atoms] == list(range(12))


def test_third_party_observer_is_designated_first(load):
    resolved = ResolvedScenario(load("double_suicide_third_party"))
    first = resolved.base_atoms[0]
    assert first.kind == AtomKind.DESIGNATE
    assert first.source_event is None
    assert first.label == "observer(neighbour)"
    assert resolved.observer.home == load("double_suicide_third_party").observer.home


def test_encounter_atoms_and_dependencies(load):
    resolved = ResolvedScenario(load("encounter_guatemala"))
    labels = [atom.label for atom in resolved.base_atoms]
    assert labels == [
        "designate(meeting.colleague)",
        "place(meeting.ego@guatemalan-village)",
        "place(meeting.colleague@guatemalan-village)",
    ]
    assert resolved.depends_on(resolved.base_atoms[2]) == frozenset({0})
    assert resolved.depends_on(resolved.base_atoms[1]) == frozenset()


def test_celebrity_ranks_come_from_lists(load):
    resolved = ResolvedScenario(load("lincoln_kennedy"))
    assert resolved.entity("lincoln").prominence_rank == 1
    assert resolved.entity("kennedy").prominence_rank == 3
    assert resolved.entity(EGO).home == load("lincoln_kennedy").observer.home
    with pytest.raises(UnresolvedReferenceError):
        resolved.entity("booth")


def test_hypothesis_atoms_follow_base_atoms(load):
    resolved = ResolvedScenario(load("double_suicide_common_decision"))
    atom = resolved.hypothesis_atoms["common-decision"]
    assert atom.index == len(resolved.base_atoms)
    assert resolved.atoms(["common-decision"])[-1] == atom
    with pytest.raises(UnresolvedReferenceError):
        resolved.atoms(["telepathy"])


def test_density_from_kind():
    built = scenario([event("b", location=loc(0), kind="blaze")], event_densities={"blaze": 0.01})
    assert ResolvedScenario(built).density_for("b") == 0.01


def test_enumerate_respects_placement_dependencies():
    built = scenario(
        [event("a", location=loc(0)), event("b", participants=["p"], location=loc(0.2))],
        entities=[Entity(id="p", home=loc(5))],
    )
    sequences = enumerate_sequences(built)
    assert [sequence.indices for sequence in sequences] == [[0, 1, 2], [1, 0, 2]]


def test_enumerate_independent_atoms_gives_every_permutation():
    built = scenario([
        event("a", features=[token("f", "x", 4)], location=loc(0), t=1),
        event("b", location=loc(10), t=2),
    ])
    sequences = enumerate_sequences(built)
    assert len(sequences) == 120
    assert sequences[0].indices == [0, 1, 2, 3, 4]
    assert sequences[-1].indices == [4, 3, 2, 1, 0]


def test_enumerate_with_hypotheses():
    built = scenario(
        [event("a", location=loc(0)), event("b", location=loc(10))],
        hypotheses=[CausalHypothesis(id="h", credibility_cost=1, explains=["a", "b"])],
    )
    assert len(enumerate_sequences(built)) == 2
    assert len(enumerate_sequences(built, hypotheses=["h"])) == 6


def test_enumerate_is_bounded(load):
    with pytest.raises(TooManyAtomsError):
        enumerate_sequences(load("double_suicide"))


@pytest.mark.parametrize("name", fixture_names())
def test_bundled_scenarios_are_valid(load, name):
    assert validate_scenario(load(name)) == []


def test_duplicate_feature_is_one_violation():
    built = scenario([event("a", features=[token("f", "x", 4), token("f", "y", 4)])])
    violations = validate_scenario(built)
    assert violations == ["events[a].features[f]: duplicate feature name"]


def test_violations_name_their_ids():
    built = scenario(
        [event("a", participants=["ghost"]), event("a", location=loc(0, a=1000))],
        hypotheses=[CausalHypothesis(id="h", credibility_cost=1, explains=["zzz"],
                                     residual_costs={"a": 1.0})],
    )
    violations = validate_scenario(built)
    assert "events[a]: duplicate event id" in violations
    assert "events[a].participants[ghost]: unknown entity" in violations
    assert "events[a].location: resolution cell 1000.0 km exceeds world area" in violations
    assert "hypotheses[h].explains: unknown event 'zzz'" in violations
    assert "hypotheses[h].residual_costs[a]: event is not explained" in violations


def test_validation_is_order_independent_and_idempotent():
    first = event("a", features=[token("f", "x", 4, likely_set_size=8)], location=loc(0), t=0, tau=5000)
    second = event("b", participants=["ego", "nobody"], location=loc(3))
    forward = validate_scenario(scenario([first, second]))
    backward = validate_scenario(scenario([second, first]))
    assert forward == backward == sorted(forward)
    assert len(forward) == 3
    assert validate_scenario(scenario([first, second])) == forward


def test_density_and_reserved_ids_are_checked():
    built = scenario(
        [event("a", location=loc(0, a=2), occurrence_density=1.0)],
        entities=[Entity(id=EGO)],
    )
    violations = validate_scenario(built)
    assert "events[a].occurrence_density: more than one event per resolution cell" in violations
    assert "world.entities[ego]: 'ego' is reserved for the observer" in violations


def test_third_party_observer_needs_a_way_to_be_found():
    observer = Observer(identity=ObserverIdentity.THIRD_PARTY, entity="q", home=loc(0))
    built = scenario([event("a", location=loc(5))], entities=[Entity(id="q")], observer=observer)
    assert validate_scenario(built) == ["observer: third party needs a prominence rank or ego_home"]
    ranked = scenario([event("a", location=loc(5))], entities=[Entity(id="q", prominence_rank=3)],
                      observer=observer)
    assert validate_scenario(ranked) == []


def test_service_enumeration_uses_the_configured_bound(service, load):
    built = scenario(
        [event("a", location=loc(0)), event("b", location=loc(10))],
        hypotheses=[CausalHypothesis(id="h", credibility_cost=1, explains=["a", "b"])],
    )
    narrow = ServiceFactory(Settings(max_sequence_atoms=2)).get_unexpectedness_service()
    assert narrow.max_sequence_atoms == 2
    assert len(narrow.enumerate_sequences(built)) == 2
    with pytest.raises(TooManyAtomsError):
        narrow.enumerate_sequences(built, hypotheses=["h"])
    assert len(service.enumerate_sequences(built, hypotheses=["h"])) == 6
    with pytest.raises(TooManyAtomsError):
        service.enumerate_sequences(load("double_suicide"))
