import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from core.errors import (
    InvalidScenarioError,
    NotNormalizedError,
    OutOfRangeError,
    UndefinedForNegativeUError,
    ZeroProbabilityOutcomeError,
)
from core.models import ComputationSequence, ConditionalReport, MinCostResult, Scenario, ScoreReport
from services.event_model import ResolvedScenario, enumerate_sequences, validate_scenario
from services.machines import ObservationMachine, SequenceOptimizer, WorldMachine

logger = logging.getLogger(__name__)


def cognitive_probability(u: float) -> float:
    """2^-U: how probable the observer finds a situation of unexpectedness U."""
    if u < 0:
        raise UndefinedForNegativeUError(f"Cognitive probability is undefined for U = {u:.4f} < 0.")
    return 2.0 ** -u


def shannon_baseline(p: float) -> float:
    """Surprisal log2(1/p) of an outcome of probability p."""
    if not 0 < p <= 1:
        raise OutOfRangeError(f"Probability must be in (0, 1], got {p}.")
    return -math.log2(p)


def weaver_baseline(p_all: Sequence[float], i: int) -> float:
    """Weaver's surprise index of outcome i (1-based): sum of squared probabilities over p_i."""
    probabilities = np.asarray(p_all, dtype=float)
    if probabilities.ndim != 1 or probabilities.size == 0 or np.any(probabilities < 0) \
            or abs(probabilities.sum() - 1.0) > 1e-9:
        raise NotNormalizedError(f"Probabilities must be non-negative and sum to 1, got {list(p_all)}.")
    if not 1 <= i <= probabilities.size:
        raise OutOfRangeError(f"Outcome index {i} is outside 1..{probabilities.size}.")
    p_i = probabilities[i - 1]
    if p_i == 0:
        raise ZeroProbabilityOutcomeError(f"Outcome {i} has zero probability.")
    return float(np.sum(probabilities ** 2) / p_i)


class UnexpectednessService:
    """Scores scenarios as the gap between world complexity and description complexity."""

    def __init__(self, optimizer: SequenceOptimizer, world_machine: WorldMachine,
                 observation_machine: ObservationMachine, max_sequence_atoms: int = 8):
        self.optimizer = optimizer
        self.world_machine = world_machine
        self.observation_machine = observation_machine
        self.max_sequence_atoms = max_sequence_atoms

    def resolve(self, scenario: Scenario) -> ResolvedScenario:
        """Validates a scenario and resolves its references."""
        violations = validate_scenario(scenario)
        if violations:
            raise InvalidScenarioError(f"Scenario has {len(violations)} violation(s).", violations)
        return ResolvedScenario(scenario)

    def enumerate_sequences(self, scenario: Scenario, hypotheses: Sequence[str] = ()) -> List[ComputationSequence]:
        """Every admissible order of the scenario's atoms, up to the configured atom count."""
        sequences = enumerate_sequences(self.resolve(scenario), self.max_sequence_atoms, hypotheses)
        logger.debug(f"Enumerated {len(sequences)} computation sequence(s).")
        return sequences

    def unexpectedness(self, scenario: Scenario) -> ScoreReport:
        """U = Cw - C, with both complexities minimised over computation sequences."""
        resolved = self.resolve(scenario)
        world = self.optimizer.min_cost(resolved, self.world_machine)
        observation = self.optimizer.min_cost(resolved, self.observation_machine)
        report = self._report(world, observation)
        logger.info(f"Scenario {scenario.name or '<unnamed>'}: Cw={report.cw_bits:.4f} "
                    f"C={report.c_bits:.4f} U={report.u_bits:.4f} bits")
        if world.hypotheses_used:
            logger.info(f"World optimum uses hypotheses {world.hypotheses_used}")
        return report

    def causal_filter(self, scenario: Scenario) -> ScoreReport:
        """
        Unexpectedness once plausible causes are taken into account.

        A hypothesis enters the world computation only when it lowers Cw, so a
        good explanation collapses U while an incredible one changes nothing.
        """
        return self.unexpectedness(scenario)

    def coincidence_score(self, scenario: Scenario) -> ScoreReport:
        """
        Unexpectedness of a two-event coincidence, with the first-then-second sequence bound.

        The bound is the world optimum minus the observation cost of describing
        the first event (after the observer) and then the second; it never
        exceeds U, because U uses the best order.
        """
        if len(scenario.events) != 2:
            raise InvalidScenarioError(f"A coincidence needs exactly two events, got {len(scenario.events)}.")
        report = self.unexpectedness(scenario)
        return report.model_copy(update={"sequence_bound": self._sequence_bound(ResolvedScenario(scenario), report)})

    def score(self, scenario: Scenario) -> ScoreReport:
        """
        Full report for the command line: unexpectedness, plus the sequence
        bound for two-event scenarios and the observer cost for third parties.
        """
        resolved = self.resolve(scenario)
        report = self.unexpectedness(scenario)
        update = {}
        if len(scenario.events) == 2:
            update["sequence_bound"] = self._sequence_bound(resolved, report)
        if resolved.has_third_party_observer:
            update["observer_cost"] = self.observation_machine.observer_cost(resolved)
        return report.model_copy(update=update)

    def _sequence_bound(self, resolved: ResolvedScenario, report: ScoreReport) -> float:
        first, second = (event.id for event in resolved.scenario.events)
        first_block = [atom for atom in resolved.base_atoms if atom.source_event in (None, first)]
        second_block = resolved.atoms_of_events([second])
        blocked = self.optimizer.min_cost(resolved, self.observation_machine, first_block).total + \
            self.optimizer.min_cost(resolved, self.observation_machine, second_block, pinned=first_block).total
        return report.cw_bits - blocked

    def encounter_score(self, scenario: Scenario) -> ScoreReport:
        """Unexpectedness of the observer meeting someone somewhere."""
        resolved = self.resolve(scenario)
        if not any(event.location is not None and resolved.observer_id in event.participants
                   and len(event.participants) >= 2 for event in scenario.events):
            raise InvalidScenarioError("An encounter needs an event placing the observer and someone else.")
        return self.unexpectedness(scenario)

    def observer_adjusted(self, scenario: Scenario) -> ScoreReport:
        """Unexpectedness for whoever observes: a third party costs C(Q) bits to reach."""
        resolved = self.resolve(scenario)
        report = self.unexpectedness(scenario)
        return report.model_copy(update={"observer_cost": self.observation_machine.observer_cost(resolved)})

    def conditional_unexpectedness(self, scenario: Scenario, first_events: Sequence[str]) -> ConditionalReport:
        """
        Splits a scenario into D1 (first_events) and D2 (the rest) and returns U(D1) and U(D2|D1).

        Observation of D2 is minimised with D1 already known; the world
        conditional follows the chain rule, so their sum never exceeds U(D1*D2).
        """
        resolved = self.resolve(scenario)
        for event_id in first_events:
            resolved.event(event_id)
        observer_atoms = [atom for atom in resolved.base_atoms if atom.source_event is None]
        first_block = observer_atoms + resolved.atoms_of_events(first_events)
        first_indices = {atom.index for atom in first_block}
        second_block = [atom for atom in resolved.base_atoms if atom.index not in first_indices]

        world_joint = self.optimizer.min_cost(resolved, self.world_machine).total
        world_first = self.optimizer.min_cost(resolved, self.world_machine, first_block).total
        observation_joint = self.optimizer.min_cost(resolved, self.observation_machine).total
        observation_first = self.optimizer.min_cost(resolved, self.observation_machine, first_block).total
        observation_second = self.optimizer.min_cost(
            resolved, self.observation_machine, second_block, pinned=first_block).total

        return ConditionalReport(
            first_events=list(first_events),
            u_first=world_first - observation_first,
            u_second_given_first=(world_joint - world_first) - observation_second,
            u_joint=world_joint - observation_joint,
        )

    @staticmethod
    def _report(world: MinCostResult, observation: MinCostResult) -> ScoreReport:
        u = world.total - observation.total
        probability: Optional[float] = cognitive_probability(u) if u >= 0 else None
        return ScoreReport(
            u_bits=u,
            cw_bits=world.total,
            c_bits=observation.total,
            cognitive_probability=probability,
            hypotheses_used=world.hypotheses_used,
            w_breakdown=world.breakdown,
            o_breakdown=observation.breakdown,
            w_sequence=world.sequence.labels,
            o_sequence=observation.sequence.labels,
        )

