import math

import pytest

from core.errors import (
    InvalidScenarioError,
    NotNormalizedError,
    OutOfRangeError,
    UndefinedForNegativeUError,
    ZeroProbabilityOutcomeError,
)
from core.models import CausalHypothesis, Entity, InstructionCostModel, Location, Scenario
from scenario_builders import event, scenario, token
from services.codecs import person_by_distance_rank, rank_complexity
from services.event_model import ResolvedScenario
from services.unexpectedness_service import cognitive_probability, shannon_baseline, weaver_baseline

D = math.log2(10)


def with_world(scenario_: Scenario, **update) -> Scenario:
    return scenario_.model_copy(update={"world": scenario_.world.model_copy(update=update)})


def with_events(scenario_: Scenario, events) -> Scenario:
    return scenario_.model_copy(update={"events": list(events)})


def add_feature(scenario_: Scenario, feature) -> Scenario:
    return with_events(scenario_, [e.model_copy(update={"features": e.features + [feature]})
                                   for e in scenario_.events])


def test_odometer(service, load):
    report = service.unexpectedness(load("odometer"))
    assert report.u_bits == pytest.approx(13.2877, abs=1e-3)
    assert report.u_bits == pytest.approx(4 * D, abs=1e-9)
    assert report.cognitive_probability == pytest.approx(1e-4, abs=1e-6)
    assert report.w_breakdown.per_atom[0].rule == "digits"
    assert "REPEAT(4)" in report.o_breakdown.per_atom[0].detail


def test_any_amount(service, load):
    report = service.unexpectedness(load("any_amount"))
    assert report.u_bits == pytest.approx(0.0, abs=1e-9)
    assert report.cognitive_probability == pytest.approx(1.0)


@pytest.mark.parametrize("opcode_cost", [1.0, 2.0, 3.0])
def test_odometer_does_not_depend_on_opcode_cost(service, load, opcode_cost):
    odometer = with_world(load("odometer"), cost_model=InstructionCostModel(opcode_cost=opcode_cost))
    assert service.unexpectedness(odometer).u_bits == pytest.approx(4 * D, abs=1e-9)


def test_famous_entity_alone_is_negative(service):
    built = scenario([event("a", participants=["kennedy"])], entities=[Entity(id="kennedy", prominence_rank=3)])
    report = service.unexpectedness(built)
    assert report.u_bits == pytest.approx(-rank_complexity(3))
    assert report.cognitive_probability is None


def test_double_suicide_is_unexpected(service, load):
    report = service.unexpectedness(load("double_suicide"))
    assert report.u_bits > 30
    assert report.hypotheses_used == []


def test_unrelated_events_are_barely_unexpected(service, load):
    unrelated = service.unexpectedness(load("unrelated_events")).u_bits
    assert unrelated < 1.0
    assert unrelated < service.unexpectedness(load("double_suicide")).u_bits


def test_removing_a_shared_feature_lowers_unexpectedness(service, load):
    base = load("double_suicide")
    stripped = with_events(base, [e.model_copy(update={"features": [f for f in e.features if f.name != "dress"]})
                                  for e in base.events])
    assert service.unexpectedness(base).u_bits - service.unexpectedness(stripped).u_bits == \
        pytest.approx(4.0, abs=1e-9)


@pytest.mark.parametrize("k", [1, 3, 5, 8])
def test_shared_feature_adds_its_cost(service, load, k):
    base = load("double_suicide")
    richer = add_feature(base, token("hair", "grey", 2 ** k))
    assert service.unexpectedness(richer).u_bits - service.unexpectedness(base).u_bits == \
        pytest.approx(k, abs=1e-9)


def test_remote_encounter(service, load):
    report = service.encounter_score(load("encounter_guatemala"))
    assert report.u_bits == pytest.approx(20 - rank_complexity(31), abs=1e-9)
    assert report.u_bits == pytest.approx(15.0, abs=1e-9)


@pytest.mark.parametrize("x, y", [(0, 9000), (6363.96, 6363.96), (-9000, 0), (3000, 0)])
def test_encounter_depends_on_place_complexity_not_distance(service, load, x, y):
    base = load("encounter_guatemala")
    moved = base.events[0].location.model_copy(update={"x": x, "y": y})
    variant = with_events(base, [base.events[0].model_copy(update={"location": moved})])
    assert service.encounter_score(variant).u_bits == pytest.approx(15.0, abs=1e-9)


def test_celebrity_encounter_is_more_unexpected(service, load):
    celebrity = service.encounter_score(load("encounter_celebrity")).u_bits
    colleague = service.encounter_score(load("encounter_guatemala")).u_bits
    assert celebrity == pytest.approx(19.0, abs=1e-9)
    assert celebrity - colleague == pytest.approx(rank_complexity(31) - rank_complexity(1))


def test_celebrity_met_near_home_is_placed_by_distance_rank(service, load):
    fixture = load("encounter_celebrity_home")
    report = service.encounter_score(fixture)
    resolved = ResolvedScenario(fixture)
    star_place = resolved.base_atoms[2]
    expected = person_by_distance_rank(resolved.entity("star"), star_place.location, fixture.world) - 1
    assert report.u_bits == pytest.approx(expected, abs=1e-9)
    assert report.w_breakdown.rule_for(star_place.index) == "distance-rank"
    assert report.o_breakdown.rule_for(1) == "relative-home"


def test_encounter_needs_an_encounter(service, load):
    with pytest.raises(InvalidScenarioError):
        service.encounter_score(load("odometer"))


def test_third_party_observer_costs_its_designation(service, load):
    ego = service.unexpectedness(load("double_suicide")).u_bits
    adjusted = service.observer_adjusted(load("double_suicide_third_party"))
    assert ego - adjusted.u_bits == pytest.approx(7.0, abs=1e-9)
    assert adjusted.observer_cost == pytest.approx(7.0)
    assert service.observer_adjusted(load("double_suicide")).observer_cost == 0.0


def test_nearby_observer_finds_it_more_unexpected(service, load):
    assert service.unexpectedness(load("double_suicide_local")).u_bits > \
        service.unexpectedness(load("double_suicide")).u_bits


def test_credible_cause_absorbs_the_coincidence(service, load):
    plain = service.unexpectedness(load("double_suicide"))
    explained = service.causal_filter(load("double_suicide_common_decision"))
    assert explained.hypotheses_used == ["common-decision"]
    assert explained.cw_bits == pytest.approx(4.0)
    assert explained.u_bits == pytest.approx(4.0 - plain.c_bits, abs=1e-9)
    assert explained.u_bits < plain.u_bits


def test_incredible_cause_changes_nothing(service, load):
    plain = service.unexpectedness(load("double_suicide"))
    telepathy = service.causal_filter(load("double_suicide_telepathy"))
    assert telepathy.model_dump() == plain.model_dump()


def test_partial_cause_lowers_by_at_most_what_it_replaces(service, optimizer, load):
    base = load("double_suicide")
    resolved = ResolvedScenario(base)
    first_alone = optimizer.min_cost(resolved, service.world_machine, resolved.atoms_of_events(["e1"])).total
    partial = base.model_copy(update={"hypotheses": [CausalHypothesis(id="h", credibility_cost=2, explains=["e1"])]})
    drop = service.unexpectedness(base).u_bits - service.unexpectedness(partial).u_bits
    assert drop <= first_alone - 2 + 1e-9
    assert drop == pytest.approx(first_alone - 2)


def test_round_numbers_and_analogy(service, load):
    hundred = service.unexpectedness(load("lincoln_kennedy"))
    eighty_seven = service.unexpectedness(load("lincoln_kennedy_87"))
    mismatched = service.unexpectedness(load("lincoln_kennedy_87_113"))
    assert hundred.u_bits > eighty_seven.u_bits > mismatched.u_bits
    car = next(cost for cost in hundred.o_breakdown.per_atom if "car_make" in cost.atom)
    assert car.rule == "association"
    assert car.bits == 0.0


def test_blaze_at_a_landmark(service, load):
    blaze = load("eiffel_blaze")
    report = service.unexpectedness(blaze)
    assert report.u_bits == pytest.approx(math.log2(40_000) - 1, abs=1e-9)
    denser = with_world(blaze, event_densities={"minor-blaze": 0.02})
    assert report.u_bits - service.unexpectedness(denser).u_bits == pytest.approx(1.0, abs=1e-9)


def test_coincidence_bound(service, load):
    report = service.coincidence_score(load("double_suicide"))
    assert report.sequence_bound is not None
    assert report.sequence_bound <= report.u_bits + 1e-9
    with pytest.raises(InvalidScenarioError):
        service.coincidence_score(load("odometer"))


def test_score_adds_bound_and_observer_cost(service, load):
    report = service.score(load("double_suicide_third_party"))
    assert report.sequence_bound is not None
    assert report.observer_cost == pytest.approx(7.0)
    single = service.score(load("odometer"))
    assert single.sequence_bound is None
    assert single.observer_cost is None


def test_conditional_unexpectedness_is_superadditive(service, load):
    split = service.conditional_unexpectedness(load("double_suicide"), ["e1"])
    assert split.split_total <= split.u_joint + 1e-9
    assert split.u_joint == pytest.approx(service.unexpectedness(load("double_suicide")).u_bits)


def test_invalid_scenario_is_rejected_with_violations(service):
    built = scenario([event("a", participants=["ghost"]), event("b", location=Location(x=0, y=0, resolution_a=500))])
    with pytest.raises(InvalidScenarioError) as raised:
        service.unexpectedness(built)
    assert "events[a].participants[ghost]: unknown entity" in raised.value.violations
    assert len(raised.value.violations) == 2


def test_report_serialises_with_short_names(service, load):
    report = service.unexpectedness(load("odometer"))
    document = report.model_dump(mode="json", by_alias=True)
    assert document["U"] == round(4 * D, 4)
    assert document["cognitive_probability"] == 0.0001
    assert set(document) >= {"U", "Cw", "C", "hypotheses_used", "w_breakdown", "o_breakdown"}


def test_cognitive_probability():
    assert cognitive_probability(0.0) == 1.0
    assert cognitive_probability(4 * D) == pytest.approx(1e-4, rel=1e-9)
    with pytest.raises(UndefinedForNegativeUError):
        cognitive_probability(-1.0)


@pytest.mark.parametrize("p", [1.0, 0.5, 1e-4])
def test_shannon_round_trip(p):
    assert cognitive_probability(shannon_baseline(p)) == pytest.approx(p, abs=1e-12)


def test_shannon_domain():
    assert shannon_baseline(0.5) == pytest.approx(1.0)
    for bad in (0.0, 1.5, -0.1):
        with pytest.raises(OutOfRangeError):
            shannon_baseline(bad)


def test_weaver_baseline():
    assert weaver_baseline([0.25] * 4, 2) == pytest.approx(1.0, abs=1e-12)
    assert weaver_baseline([1.0], 1) == pytest.approx(1.0)
    assert weaver_baseline([0.9, 0.1], 2) == pytest.approx(8.2)
    assert weaver_baseline([0.9, 0.1], 1) == pytest.approx(0.82 / 0.9)
    with pytest.raises(NotNormalizedError):
        weaver_baseline([0.5, 0.4], 1)
    with pytest.raises(ZeroProbabilityOutcomeError):
        weaver_baseline([1.0, 0.0], 2)
    with pytest.raises(OutOfRangeError):
        weaver_baseline([1.0], 0)
    with pytest.raises(OutOfRangeError):
        weaver_baseline([1.0], 2)
