import itertools
import logging
import math
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

from core.errors import MissingObserverDataError, TooManyAtomsError
from core.interfaces import CostMachine
from core.models import (
    AtomCost,
    AtomKind,
    ComputationSequence,
    CostBreakdown,
    DescriptionAtom,
    EntityKind,
    FeatureKind,
    Location,
    Machine,
    MinCostResult,
)
from services.codecs import (
    digit_string_program,
    feature_instantiation,
    person_by_distance_rank,
    rank_complexity,
    spatial_absolute,
    spatial_relative,
    temporal_absolute,
    temporal_relative,
    world_digit_string_program,
    world_location_cost,
)
from services.event_model import ResolvedScenario

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
SPATIAL = "spatial"
TEMPORAL = "temporal"


def _cheapest(options: List[Tuple[float, str]]) -> Tuple[float, str]:
    """First option of minimal cost; earlier options win ties."""
    best = options[0]
    for option in options[1:]:
        if option[0] < best[0] - TOLERANCE:
            best = option
    return best


def _feature_rule(atom: DescriptionAtom, machine: Machine) -> str:
    feature = atom.feature
    if feature.is_numeral:
        return "digits"
    if machine == Machine.WORLD and feature.likely_set_size is not None:
        return "likely-set"
    return "domain"


def _co_present(atom: DescriptionAtom, context: Sequence[DescriptionAtom]) -> bool:
    """Whether another entity already stands at the atom's location."""
    return any(other.kind == AtomKind.PLACE and other.entity_id != atom.entity_id
               and atom.location.same_cell(other.location) for other in context)


class WorldMachine(CostMachine):
    """
    The world machine generates situations the way the world would.

    Events are independent unless a causal hypothesis in context generates them;
    entities the world already has cost nothing, places cost their share of the
    world area (or of the occurrence density), and every numeral digit is drawn
    on its own.
    """

    machine = Machine.WORLD

    def atom_cost(self, atom: DescriptionAtom, context: Sequence[DescriptionAtom],
                  resolved: ResolvedScenario) -> Tuple[float, str]:
        if atom.kind == AtomKind.HYPOTHESIS:
            hypothesis = resolved.hypothesis(atom.hypothesis_id)
            residuals = sum(hypothesis.residual_costs.get(event_id, 0.0) for event_id in hypothesis.explains)
            return hypothesis.credibility_cost + residuals, "hypothesis"

        if atom.source_event is not None and any(
                other.kind == AtomKind.HYPOTHESIS
                and atom.source_event in resolved.hypothesis(other.hypothesis_id).explains
                for other in context):
            return 0.0, "explained"

        if atom.kind == AtomKind.DESIGNATE:
            if atom.source_event is None:
                return 0.0, "observer"
            entity = resolved.entity(atom.entity_id)
            if entity.known_to_world:
                return 0.0, "known"
            if entity.prominence_rank is not None:
                return rank_complexity(entity.prominence_rank), "prominence"
            return 0.0, "anonymous"

        if atom.kind == AtomKind.INSTANTIATE:
            return feature_instantiation(atom.feature, self.machine, resolved.cost_model), \
                _feature_rule(atom, self.machine)

        if atom.kind == AtomKind.LOCATE:
            density = resolved.density_for(atom.source_event)
            return world_location_cost(atom.location, resolved.world, density), \
                "density" if density is not None else "area"

        if atom.kind == AtomKind.PLACE:
            entity = resolved.entity(atom.entity_id)
            options = [(world_location_cost(atom.location, resolved.world), "independent-placement")]
            if entity.home is not None and atom.location.same_cell(entity.home):
                options.insert(0, (0.0, "home"))
            if entity.kind == EntityKind.PERSON and entity.home is not None and _co_present(atom, context):
                options.append((person_by_distance_rank(entity, atom.location, resolved.world), "distance-rank"))
            return _cheapest(options)

        return temporal_absolute(atom.time, resolved.world), "absolute"

    def context_keys(self, atom: DescriptionAtom, resolved: ResolvedScenario,
                     explained_events: FrozenSet[str]) -> FrozenSet[Hashable]:
        keys: set = set()
        if atom.kind == AtomKind.HYPOTHESIS:
            keys.update(("explained", event_id) for event_id in resolved.hypothesis(atom.hypothesis_id).explains)
        if atom.source_event in explained_events:
            keys.add(("explained", atom.source_event))
        if atom.kind in (AtomKind.DESIGNATE, AtomKind.PLACE):
            keys.add(("entity", atom.entity_id))
        if atom.kind in (AtomKind.LOCATE, AtomKind.PLACE):
            keys.add(SPATIAL)
        return frozenset(keys)


class ObservationMachine(CostMachine):
    """
    The observation machine describes what the observer perceives.

    Anything already in context is free to reuse, places and dates can be
    coded relative to ones already known (the observer's home always is),
    prominent entities and landmarks are cheap, and a name that matches an
    entity already designated comes for free.
    """

    machine = Machine.OBSERVATION

    def atom_cost(self, atom: DescriptionAtom, context: Sequence[DescriptionAtom],
                  resolved: ResolvedScenario) -> Tuple[float, str]:
        if atom.kind == AtomKind.HYPOTHESIS:
            return 0.0, "hypothesis"

        if atom.kind == AtomKind.DESIGNATE:
            if atom.source_event is None:
                return self.observer_cost(resolved), "observer"
            if any(other.kind == AtomKind.DESIGNATE and other.entity_id == atom.entity_id for other in context):
                return 0.0, "reuse"
            entity = resolved.entity(atom.entity_id)
            if entity.prominence_rank is not None:
                return rank_complexity(entity.prominence_rank), "prominence"
            if entity.kind == EntityKind.PERSON and entity.home is not None:
                return person_by_distance_rank(entity, resolved.scenario.observer.home, resolved.world), \
                    "distance-rank"
            return 0.0, "anonymous"

        if atom.kind == AtomKind.INSTANTIATE:
            feature = atom.feature
            if any(other.kind == AtomKind.INSTANTIATE and other.feature.name == feature.name
                   and other.feature.text == feature.text for other in context):
                return 0.0, "reuse"
            if feature.kind == FeatureKind.TOKEN and any(
                    other.kind == AtomKind.DESIGNATE and other.entity_id == feature.text for other in context):
                return 0.0, "association"
            return feature_instantiation(feature, self.machine, resolved.cost_model), \
                _feature_rule(atom, self.machine)

        if atom.kind == AtomKind.LOCATE:
            return self.location_cost(atom.location, context, resolved)

        if atom.kind == AtomKind.PLACE:
            if _co_present(atom, context):
                return 0.0, "co-presence"
            return self.location_cost(atom.location, context, resolved)

        options = [(temporal_absolute(atom.time, resolved.world), "absolute")]
        options.extend((temporal_relative(atom.time, other.time), "relative")
                       for other in context if other.kind == AtomKind.TIMESTAMP)
        return _cheapest(options)

    def location_cost(self, location: Location, context: Sequence[DescriptionAtom],
                      resolved: ResolvedScenario) -> Tuple[float, str]:
        """Cheapest of absolute coding and coding relative to the observer's home or a place in context."""
        absolute_rule = "prominence" if location.prominence_rank is not None else "absolute"
        options = [(spatial_absolute(location, resolved.world), absolute_rule),
                   (spatial_relative(location, resolved.scenario.observer.home), "relative-home")]
        options.extend((spatial_relative(location, other.location), "relative")
                       for other in context if other.kind in (AtomKind.LOCATE, AtomKind.PLACE))
        return _cheapest(options)

    def observer_cost(self, resolved: ResolvedScenario) -> float:
        """C(Q): bits to designate a third-party observer, by prominence or by distance from ego's home."""
        if not resolved.has_third_party_observer:
            return 0.0
        observer = resolved.observer
        if observer.prominence_rank is not None:
            return rank_complexity(observer.prominence_rank)
        ego_home = resolved.scenario.observer.ego_home
        if ego_home is None or observer.home is None:
            raise MissingObserverDataError(
                f"Observer {observer.id} has no prominence rank and cannot be located from ego's home.")
        return person_by_distance_rank(observer, ego_home, resolved.world)

    def context_keys(self, atom: DescriptionAtom, resolved: ResolvedScenario,
                     explained_events: FrozenSet[str]) -> FrozenSet[Hashable]:
        keys: set = set()
        if atom.kind in (AtomKind.DESIGNATE, AtomKind.PLACE):
            keys.add(("entity", atom.entity_id))
        if atom.kind == AtomKind.INSTANTIATE:
            keys.add(("feature", atom.feature.name, atom.feature.text))
            if atom.feature.kind == FeatureKind.TOKEN:
                keys.add(("entity", atom.feature.text))
        if atom.kind in (AtomKind.LOCATE, AtomKind.PLACE):
            keys.add(SPATIAL)
        if atom.kind == AtomKind.TIMESTAMP:
            keys.add(TEMPORAL)
        return frozenset(keys)


def _numeral_detail(atom: DescriptionAtom, machine: Machine, resolved: ResolvedScenario) -> str:
    if machine == Machine.WORLD:
        program = world_digit_string_program(atom.feature.text, resolved.cost_model)
        return f"{program}, {len(atom.feature.text)} digits drawn"
    return str(digit_string_program(atom.feature.text, resolved.cost_model))


def chain_cost(sequence: ComputationSequence, machine: CostMachine, resolved: ResolvedScenario,
               pinned: Sequence[DescriptionAtom] = ()) -> CostBreakdown:
    """Sums the conditional cost of each atom given the atoms before it (and any pinned atoms)."""
    per_atom: List[AtomCost] = []
    context: List[DescriptionAtom] = list(pinned)
    for atom in sequence.atoms:
        bits, rule = machine.atom_cost(atom, context, resolved)
        per_atom.append(AtomCost(index=atom.index, atom=atom.label, machine=machine.machine, bits=bits, rule=rule,
                                 detail=_numeral_detail(atom, machine.machine, resolved) if rule == "digits" else None))
        context.append(atom)
    return CostBreakdown(machine=machine.machine, per_atom=per_atom, total=math.fsum(c.bits for c in per_atom))


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        root_i, root_j = self.find(i), self.find(j)
        if root_i != root_j:
            self.parent[max(root_i, root_j)] = min(root_i, root_j)


class SequenceOptimizer:
    """
    Finds the cheapest computation sequence of a scenario on one machine.

    An atom's cost depends only on which atoms precede it, not on their order,
    and only through shared context keys. Atoms are therefore grouped into
    components that share no key, and each component is minimised exactly by
    dynamic programming over the subsets of atoms already computed. Among
    optimal sequences the lexicographically first (by atom index) is returned.
    """

    def __init__(self, max_component_atoms: int = 16, max_hypotheses: int = 6):
        self.max_component_atoms = max_component_atoms
        self.max_hypotheses = max_hypotheses

    def min_cost(self, resolved: ResolvedScenario, machine: CostMachine,
                 atoms: Optional[Sequence[DescriptionAtom]] = None,
                 pinned: Sequence[DescriptionAtom] = ()) -> MinCostResult:
        """
        Minimises the chain cost of a scenario's atoms on a machine.

        The world machine also chooses which causal hypotheses to include,
        preferring fewer hypotheses when costs tie; the observation machine
        never includes them.

        Args:
            resolved: The scenario
            machine: The machine to minimise on
            atoms: Atoms to order; defaults to all base atoms of the scenario
            pinned: Atoms already known before the sequence starts

        Returns:
            The minimal total, the lexicographically first sequence achieving it, and its breakdown
        """
        base = list(resolved.base_atoms if atoms is None else atoms)
        candidates = self._hypothesis_candidates(resolved, machine, base)

        best: Optional[Tuple[float, List[DescriptionAtom], Tuple[str, ...]]] = None
        for size in range(len(candidates) + 1):
            for subset in itertools.combinations(candidates, size):
                entry_cost = sum(machine.atom_cost(resolved.hypothesis_atoms[h], [], resolved)[0] for h in subset)
                if best is not None and entry_cost >= best[0] - TOLERANCE:
                    continue
                hypothesis_atoms = [resolved.hypothesis_atoms[h] for h in subset]
                total, order = self._minimise(resolved, machine, base + hypothesis_atoms, pinned, subset)
                if best is None or total < best[0] - TOLERANCE:
                    best = (total, order, subset)
                    logger.debug(f"{machine.machine.value}: {total:.4f} bits with hypotheses {list(subset)}")

        total, order, subset = best
        sequence = ComputationSequence(atoms=order)
        breakdown = chain_cost(sequence, machine, resolved, pinned)
        return MinCostResult(machine=machine.machine, total=breakdown.total, sequence=sequence,
                             breakdown=breakdown, hypotheses_used=list(subset))

    def _hypothesis_candidates(self, resolved: ResolvedScenario, machine: CostMachine,
                               atoms: List[DescriptionAtom]) -> List[str]:
        if machine.machine != Machine.WORLD:
            return []
        events = {atom.source_event for atom in atoms}
        candidates = [h.id for h in resolved.scenario.hypotheses if events.intersection(h.explains)]
        if len(candidates) > self.max_hypotheses:
            raise TooManyAtomsError(f"{len(candidates)} hypotheses exceed the limit of {self.max_hypotheses}.")
        return candidates

    def _minimise(self, resolved: ResolvedScenario, machine: CostMachine, atoms: List[DescriptionAtom],
                  pinned: Sequence[DescriptionAtom], hypotheses: Sequence[str]) -> Tuple[float, List[DescriptionAtom]]:
        explained = frozenset(event_id for h in hypotheses for event_id in resolved.hypothesis(h).explains)
        atoms = sorted(atoms, key=lambda atom: atom.index)
        keys = [machine.context_keys(atom, resolved, explained) for atom in atoms]

        union_find = _UnionFind(len(atoms))
        owner: Dict[Hashable, int] = {}
        for position, atom_keys in enumerate(keys):
            for key in atom_keys:
                if key in owner:
                    union_find.union(owner[key], position)
                else:
                    owner[key] = position

        groups: Dict[int, List[int]] = {}
        for position in range(len(atoms)):
            groups.setdefault(union_find.find(position), []).append(position)

        total = 0.0
        orders: List[List[DescriptionAtom]] = []
        for members in groups.values():
            component = [atoms[position] for position in members]
            component_keys = [keys[position] for position in members]
            cost, order = self._minimise_component(resolved, machine, component, component_keys, pinned)
            total += cost
            orders.append(order)
        return total, self._merge(orders)

    def _minimise_component(self, resolved: ResolvedScenario, machine: CostMachine,
                            component: List[DescriptionAtom], keys: List[FrozenSet[Hashable]],
                            pinned: Sequence[DescriptionAtom]) -> Tuple[float, List[DescriptionAtom]]:
        size = len(component)
        if size > self.max_component_atoms:
            raise TooManyAtomsError(
                f"Interaction component of {size} atoms exceeds the limit of {self.max_component_atoms}.")

        local = {atom.index: position for position, atom in enumerate(component)}
        required = [0] * size
        neighbours = [0] * size
        for i, atom in enumerate(component):
            for dependency in resolved.depends_on(atom):
                if dependency in local:
                    required[i] |= 1 << local[dependency]
            for j in range(size):
                if j != i and keys[i] & keys[j]:
                    neighbours[i] |= 1 << j

        memo: Dict[Tuple[int, int], float] = {}

        def cost(i: int, mask: int) -> float:
            relevant = mask & neighbours[i]
            if (i, relevant) not in memo:
                context = list(pinned) + [component[j] for j in range(size) if relevant >> j & 1]
                memo[(i, relevant)] = machine.atom_cost(component[i], context, resolved)[0]
            return memo[(i, relevant)]

        full = (1 << size) - 1
        remaining = [math.inf] * (full + 1)
        remaining[full] = 0.0
        for mask in range(full - 1, -1, -1):
            best = math.inf
            for i in range(size):
                bit = 1 << i
                if mask & bit or required[i] & ~mask:
                    continue
                best = min(best, cost(i, mask) + remaining[mask | bit])
            remaining[mask] = best

        order: List[DescriptionAtom] = []
        mask = 0
        while mask != full:
            for i in range(size):
                bit = 1 << i
                if mask & bit or required[i] & ~mask:
                    continue
                if cost(i, mask) + remaining[mask | bit] <= remaining[mask] + TOLERANCE:
                    order.append(component[i])
                    mask |= bit
                    break
        return remaining[0], order

    @staticmethod
    def _merge(orders: List[List[DescriptionAtom]]) -> List[DescriptionAtom]:
        """Interleaves independent component orders, always taking the smallest next atom index."""
        positions = [0] * len(orders)
        merged: List[DescriptionAtom] = []
        while True:
            heads = [(order[positions[k]].index, k) for k, order in enumerate(orders) if positions[k] < len(order)]
            if not heads:
                return merged
            _, k = min(heads)
            merged.append(orders[k][positions[k]])
            positions[k] += 1
