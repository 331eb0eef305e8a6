import logging
from collections import Counter
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Union

from core.errors import TooManyAtomsError, UnresolvedReferenceError
from core.models import (
    AtomKind,
    CausalHypothesis,
    ComputationSequence,
    DescriptionAtom,
    Entity,
    EntityKind,
    EventDescription,
    FeatureKind,
    Location,
    ObserverIdentity,
    Scenario,
)

logger = logging.getLogger(__name__)

EGO = "ego"


class ResolvedScenario:
    """
    A scenario with its references resolved and its canonical atom list built.

    Atoms are numbered in a fixed order: the observer designation (third-party
    observers only), then for each event its designations, features, placement
    or location, and date. Hypothesis atoms follow, one per hypothesis in
    scenario order, and only enter a computation when a machine includes them.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.world = scenario.world
        self.cost_model = scenario.world.cost_model
        self.events: Dict[str, EventDescription] = {event.id: event for event in scenario.events}
        self.hypotheses: Dict[str, CausalHypothesis] = {h.id: h for h in scenario.hypotheses}
        self.entities: Dict[str, Entity] = self._resolve_entities(scenario)
        self.observer_id = self._observer_id(scenario)
        self.base_atoms: List[DescriptionAtom] = self._build_atoms()
        self.hypothesis_atoms: Dict[str, DescriptionAtom] = {
            hypothesis.id: DescriptionAtom(index=len(self.base_atoms) + position,
                                           kind=AtomKind.HYPOTHESIS, hypothesis_id=hypothesis.id)
            for position, hypothesis in enumerate(scenario.hypotheses)
        }
        self.dependencies: Dict[int, FrozenSet[int]] = self._build_dependencies()

    @staticmethod
    def _resolve_entities(scenario: Scenario) -> Dict[str, Entity]:
        ranks: Dict[str, int] = {}
        for members in scenario.world.celebrity_lists.values():
            for position, entity_id in enumerate(members, start=1):
                ranks.setdefault(entity_id, position)
        entities: Dict[str, Entity] = {}
        for entity in scenario.world.entities:
            if entity.prominence_rank is None and entity.id in ranks:
                entity = entity.model_copy(update={"prominence_rank": ranks[entity.id]})
            if entity.id == scenario.observer.entity and entity.home is None:
                entity = entity.model_copy(update={"home": scenario.observer.home})
            entities[entity.id] = entity
        observer = scenario.observer
        ego_home = observer.home if observer.identity == ObserverIdentity.EGO else observer.ego_home
        entities[EGO] = Entity(id=EGO, kind=EntityKind.PERSON, known_to_world=True, home=ego_home)
        return entities

    @staticmethod
    def _observer_id(scenario: Scenario) -> str:
        if scenario.observer.identity == ObserverIdentity.THIRD_PARTY and scenario.observer.entity:
            return scenario.observer.entity
        return EGO

    @property
    def observer(self) -> Entity:
        return self.entity(self.observer_id)

    @property
    def has_third_party_observer(self) -> bool:
        return self.observer_id != EGO

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnresolvedReferenceError(f"Unknown entity '{entity_id}'.") from None

    def event(self, event_id: str) -> EventDescription:
        try:
            return self.events[event_id]
        except KeyError:
            raise UnresolvedReferenceError(f"Unknown event '{event_id}'.") from None

    def hypothesis(self, hypothesis_id: str) -> CausalHypothesis:
        try:
            return self.hypotheses[hypothesis_id]
        except KeyError:
            raise UnresolvedReferenceError(f"Unknown hypothesis '{hypothesis_id}'.") from None

    def density_for(self, event_id: str) -> Optional[float]:
        """Occurrence density of an event, from the event itself or from its kind."""
        event = self.event(event_id)
        if event.occurrence_density is not None:
            return event.occurrence_density
        if event.kind is not None:
            return self.world.event_densities.get(event.kind)
        return None

    def _build_atoms(self) -> List[DescriptionAtom]:
        atoms: List[DescriptionAtom] = []

        def add(**fields) -> None:
            atoms.append(DescriptionAtom(index=len(atoms), **fields))

        if self.has_third_party_observer:
            add(kind=AtomKind.DESIGNATE, entity_id=self.observer_id)
        for event in self.scenario.events:
            for participant in event.participants:
                if participant not in (EGO, self.observer_id):
                    add(kind=AtomKind.DESIGNATE, source_event=event.id, entity_id=participant)
            for feature in event.features:
                add(kind=AtomKind.INSTANTIATE, source_event=event.id, feature=feature)
            if event.location is not None:
                if event.participants:
                    for participant in event.participants:
                        add(kind=AtomKind.PLACE, source_event=event.id, entity_id=participant,
                            location=event.location)
                else:
                    add(kind=AtomKind.LOCATE, source_event=event.id, location=event.location)
            if event.time is not None:
                add(kind=AtomKind.TIMESTAMP, source_event=event.id, time=event.time)
        return atoms

    def _build_dependencies(self) -> Dict[int, FrozenSet[int]]:
        dependencies: Dict[int, FrozenSet[int]] = {}
        for atom in self.base_atoms:
            if atom.kind != AtomKind.PLACE:
                continue
            required = {
                other.index for other in self.base_atoms
                if (other.kind == AtomKind.DESIGNATE and other.source_event == atom.source_event
                    and other.entity_id == atom.entity_id)
                or (other.kind == AtomKind.LOCATE and atom.location.same_cell(other.location))
            }
            dependencies[atom.index] = frozenset(required)
        return dependencies

    def atoms(self, hypotheses: Sequence[str] = ()) -> List[DescriptionAtom]:
        """Base atoms plus the atoms of the listed hypotheses, in index order."""
        for hypothesis_id in hypotheses:
            self.hypothesis(hypothesis_id)
        extra = [atom for hypothesis_id, atom in self.hypothesis_atoms.items() if hypothesis_id in hypotheses]
        return self.base_atoms + extra

    def atoms_of_events(self, event_ids: Sequence[str]) -> List[DescriptionAtom]:
        return [atom for atom in self.base_atoms if atom.source_event in event_ids]

    def depends_on(self, atom: DescriptionAtom) -> FrozenSet[int]:
        return self.dependencies.get(atom.index, frozenset())


def validate_scenario(scenario: Scenario) -> List[str]:
    """
    Lists every violated invariant of a scenario; an empty list means the scenario is valid.

    Violations are named by event, entity or hypothesis id and returned sorted,
    so the result does not depend on the order of events in the file.
    """
    violations: List[str] = []
    world = scenario.world
    entity_ids = [entity.id for entity in world.entities]
    known = set(entity_ids) | {EGO}

    def check_location(path: str, location: Location) -> None:
        if location.resolution_a ** 2 > world.area_s:
            violations.append(f"{path}: resolution cell {location.resolution_a} km exceeds world area")

    for entity_id, count in Counter(entity_ids).items():
        if count > 1:
            violations.append(f"world.entities[{entity_id}]: duplicate entity id")
    if EGO in entity_ids:
        violations.append(f"world.entities[{EGO}]: '{EGO}' is reserved for the observer")
    for entity in world.entities:
        if entity.home is not None:
            check_location(f"world.entities[{entity.id}].home", entity.home)
    for list_name, members in world.celebrity_lists.items():
        for member in members:
            if member not in known:
                violations.append(f"world.celebrity_lists[{list_name}]: unknown entity '{member}'")
    for kind, density in world.event_densities.items():
        if density <= 0:
            violations.append(f"world.event_densities[{kind}]: density must be positive")

    for event_id, count in Counter(event.id for event in scenario.events).items():
        if count > 1:
            violations.append(f"events[{event_id}]: duplicate event id")

    for event in scenario.events:
        path = f"events[{event.id}]"
        for name, count in Counter(feature.name for feature in event.features).items():
            if count > 1:
                violations.append(f"{path}.features[{name}]: duplicate feature name")
        for participant, count in Counter(event.participants).items():
            if count > 1:
                violations.append(f"{path}.participants[{participant}]: listed more than once")
            if participant not in known:
                violations.append(f"{path}.participants[{participant}]: unknown entity")
        for feature in event.features:
            violations.extend(_feature_violations(f"{path}.features[{feature.name}]", feature, scenario))
        if event.location is not None:
            check_location(f"{path}.location", event.location)
        if event.time is not None and event.time.resolution_tau > world.time_window_t:
            violations.append(f"{path}.time: resolution exceeds the time window")
        density = event.occurrence_density
        if density is None and event.kind is not None:
            density = world.event_densities.get(event.kind)
        if density is not None and event.location is not None and density * event.location.resolution_a ** 2 > 1:
            violations.append(f"{path}.occurrence_density: more than one event per resolution cell")

    observer = scenario.observer
    check_location("observer.home", observer.home)
    if observer.identity == ObserverIdentity.THIRD_PARTY:
        if not observer.entity:
            violations.append("observer.entity: a third-party observer must name an entity")
        elif observer.entity not in known or observer.entity == EGO:
            violations.append(f"observer.entity: unknown entity '{observer.entity}'")
        else:
            declared = next(entity for entity in world.entities if entity.id == observer.entity)
            ranked = declared.prominence_rank is not None or any(
                observer.entity in members for members in world.celebrity_lists.values())
            if not ranked and observer.ego_home is None:
                violations.append("observer: third party needs a prominence rank or ego_home")
    elif observer.entity not in (None, EGO):
        violations.append("observer.entity: an ego observer does not name an entity")

    event_ids = {event.id for event in scenario.events}
    for hypothesis_id, count in Counter(h.id for h in scenario.hypotheses).items():
        if count > 1:
            violations.append(f"hypotheses[{hypothesis_id}]: duplicate hypothesis id")
    for hypothesis in scenario.hypotheses:
        path = f"hypotheses[{hypothesis.id}]"
        if not hypothesis.explains:
            violations.append(f"{path}.explains: must name at least one event")
        for event_id in hypothesis.explains:
            if event_id not in event_ids:
                violations.append(f"{path}.explains: unknown event '{event_id}'")
        for event_id, residual in hypothesis.residual_costs.items():
            if event_id not in hypothesis.explains:
                violations.append(f"{path}.residual_costs[{event_id}]: event is not explained")
            if residual < 0:
                violations.append(f"{path}.residual_costs[{event_id}]: residual must be non-negative")

    return sorted(set(violations))


def _feature_violations(path: str, feature, scenario: Scenario) -> List[str]:
    violations: List[str] = []
    if feature.likely_set_size is not None and feature.likely_set_size > feature.domain_size:
        violations.append(f"{path}: likely set larger than the domain")
    if feature.kind == FeatureKind.INTEGER and (not isinstance(feature.value, int) or feature.value < 0):
        violations.append(f"{path}: integer feature needs a non-negative integer value")
    if feature.kind == FeatureKind.DIGITS:
        text = str(feature.value)
        if not isinstance(feature.value, str) or not text.isdigit() or not text.isascii():
            violations.append(f"{path}: digits feature needs a string of decimal digits")
        elif len(text) > scenario.world.cost_model.max_length:
            violations.append(f"{path}: digit string longer than the cost model allows")
    if feature.kind == FeatureKind.INTEGER and isinstance(feature.value, int) and \
            len(str(feature.value)) > scenario.world.cost_model.max_length:
        violations.append(f"{path}: integer longer than the cost model allows")
    if feature.kind == FeatureKind.TOKEN and not isinstance(feature.value, str):
        violations.append(f"{path}: token feature needs a string value")
    return violations


def enumerate_sequences(scenario: Union[Scenario, "ResolvedScenario"], max_atoms: int = 8,
                        hypotheses: Sequence[str] = ()) -> List[ComputationSequence]:
    """
    Lists every dependency-respecting order of the scenario's atoms, lexicographically by atom index.

    Factorial in the atom count, so it is bounded; min_cost does not need it.
    """
    resolved = scenario if isinstance(scenario, ResolvedScenario) else ResolvedScenario(scenario)
    atoms = resolved.atoms(hypotheses)
    if len(atoms) > max_atoms:
        raise TooManyAtomsError(f"{len(atoms)} atoms exceed the enumeration bound of {max_atoms}.")
    return [ComputationSequence(atoms=list(order)) for order in _orders(resolved, atoms)]


def _orders(resolved: ResolvedScenario, atoms: List[DescriptionAtom]) -> Iterator[List[DescriptionAtom]]:
    placed: List[DescriptionAtom] = []
    done: set = set()

    def extend() -> Iterator[List[DescriptionAtom]]:
        if len(placed) == len(atoms):
            yield list(placed)
            return
        for atom in atoms:
            if atom.index in done or not resolved.depends_on(atom) <= done:
                continue
            placed.append(atom)
            done.add(atom.index)
            yield from extend()
            placed.pop()
            done.discard(atom.index)

    return extend()
